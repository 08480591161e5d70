// Config-driven experiment runner. Each command writes CSV reports and grid
// dumps into the output directory.
//
// Exit codes: 0 success, 1 acceptance criterion failed, 2 precondition
// rejected, 3 numerical failure, 64 unknown command, 65 invalid config.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "dpde/acceptance.hpp"
#include "dpde/continuum.hpp"
#include "dpde/oracle.hpp"
#include "dpde/projector.hpp"
#include "dpde/samples.hpp"
#include "dpde/solvers.hpp"
#include "dpde/symbols.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using namespace dpde;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnknownCommand = 64;
constexpr int kExitInvalidConfig = 65;

struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownCommand : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, std::set<std::string>> kKeys{
    {"run", {"command", "seed", "criterion"}},
    {"grid", {"h", "N", "half_length", "h_list", "convention"}},
    {"symbol", {"factorization", "weight_mode"}},
    {"problem", {"s", "n", "layer_c", "trials", "M_list", "scale"}},
    {"data", {"rhs", "f", "g"}},
    {"projector", {"realizations", "eps_hbar"}},
    {"continuum", {"factor", "data", "points"}},
    {"output", {"dir"}},
};

class Config {
 public:
  explicit Config(pt::ptree tree) : tree_(std::move(tree)) {
    for (const auto& [section, body] : tree_) {
      const auto it = kKeys.find(section);
      if (it == kKeys.end()) throw InvalidConfig("unknown config section [" + section + "]");
      if (!body.data().empty()) throw InvalidConfig("top-level key " + section + " must live in a section");
      for (const auto& [key, _] : body)
        if (!it->second.count(key)) throw InvalidConfig("unknown config key " + section + "." + key);
    }
  }

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

  template <class T>
  T get(const std::string& key, const T& fallback) const {
    if (!has(key)) return fallback;
    return require<T>(key);
  }

  template <class T>
  T require(const std::string& key) const {
    const auto raw = tree_.get_optional<std::string>(key);
    if (!raw) throw InvalidConfig("missing config key " + key);
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        return *raw;
      } else {
        std::istringstream is(*raw);
        T v;
        if (!(is >> v) || !(is >> std::ws).eof()) throw InvalidConfig("");
        return v;
      }
    } catch (const InvalidConfig&) {
      throw InvalidConfig("config key " + key + " has invalid value '" + *raw + "'");
    }
  }

  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& part : dpde::detail::split_top_level(require<std::string>(key), ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw InvalidConfig("config key " + key + " has invalid list entry '" + part + "'");
      }
    }
    if (out.empty()) throw InvalidConfig("config key " + key + " is empty");
    return out;
  }

  void put(const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw InvalidConfig("override key must be section.key: " + key);
    const auto it = kKeys.find(key.substr(0, dot));
    if (it == kKeys.end() || !it->second.count(key.substr(dot + 1))) throw InvalidConfig("unknown override key " + key);
    tree_.put(key, value);
  }

  /// Every set key as `section.key = value`, sorted.
  void echo(std::ostream& os) const {
    std::map<std::string, std::string> flat;
    for (const auto& [section, body] : tree_)
      for (const auto& [key, v] : body) flat[section + "." + key] = v.data();
    for (const auto& [k, v] : flat) os << k << " = " << v << '\n';
  }

 private:
  pt::ptree tree_;
};

class Runner {
 public:
  Runner(Config cfg, fs::path out) : cfg_(std::move(cfg)), out_(std::move(out)) {
    fs::create_directories(out_);
    seed_ = cfg_.get<unsigned>("run.seed", 1);
  }

  int run(const std::string& command) {
    {
      std::ofstream meta(out_ / "run.meta");
      meta << "command = " << command << '\n';
      cfg_.echo(meta);
    }
    if (command == "solve-unique") return solve_unique_cmd();
    if (command == "general-solution") return general_solution_cmd();
    if (command == "solve-dirichlet") return dirichlet_cmd();
    if (command == "solve-nonlocal") return nonlocal_cmd();
    if (command == "project") return project_cmd();
    if (command == "factorize-exp") return factorize_cmd();
    if (command == "certify-symbol") return certify_cmd();
    if (command == "oracle-compare") return oracle_cmd();
    if (command == "convergence") return convergence_cmd();
    if (command == "acceptance") return acceptance_cmd();
    throw UnknownCommand("unknown command '" + command + "'");
  }

 private:
  // --- configuration helpers ---

  Quadrant convention() const {
    try {
      return quadrant_from_string(cfg_.get<std::string>("grid.convention", "closed"));
    } catch (const std::invalid_argument& e) {
      throw InvalidConfig(e.what());
    }
  }

  double half_length() const { return cfg_.get<double>("grid.half_length", 8.0); }

  LatticeGrid grid_for(double h) const {
    if (!(h > 0.0)) throw InvalidConfig("lattice step must be positive");
    const int n = cfg_.has("grid.N") ? cfg_.require<int>("grid.N") : window_points(h, half_length());
    if (n < 2) throw InvalidConfig("grid.N must be at least 2");
    return LatticeGrid(h, n);
  }

  std::vector<double> steps() const {
    if (cfg_.has("grid.h_list")) {
      if (cfg_.has("grid.N")) throw InvalidConfig("grid.h_list needs grid.half_length, not grid.N");
      return cfg_.list("grid.h_list", {});
    }
    return {cfg_.get<double>("grid.h", 0.25)};
  }

  std::string factorization_name() const { return cfg_.get<std::string>("symbol.factorization", acceptance::acceptance_symbol(1)); }

  WaveFactorization factorization(const LatticeGrid& g) const {
    try {
      return catalog_factorization(factorization_name(), g, convention());
    } catch (const std::invalid_argument& e) {
      throw InvalidConfig(e.what());
    }
  }

  GridFunction rhs(const LatticeGrid& g) const {
    const auto [name, args] = dpde::detail::parse_call(cfg_.get<std::string>("data.rhs", "bumps"));
    const Quadrant q = convention();
    if (name == "zero") return GridFunction(g);
    if (name == "bumps") return quadrant_bumps(g, seed_, q);
    if (name == "corner" && args.size() == 1) return corner_random(g, seed_, std::stod(args[0]), false);
    if (name == "corner_axis_free" && args.size() == 1) return corner_random(g, seed_, std::stod(args[0]), true);
    if (name == "file" && args.size() == 1) return read_grid(g, args[0]);
    throw InvalidConfig("unknown data.rhs entry '" + name + "'");
  }

  LineFunction line(const LatticeGrid& g, const std::string& key, unsigned seed) const {
    const auto [name, args] = dpde::detail::parse_call(cfg_.require<std::string>(key));
    if (name == "zero") return LineFunction(g);
    if (name == "bumps") return half_line_bumps(g, seed);
    if (name == "zero_mean" && args.size() == 1) return zero_mean_profile(g, std::stod(args[0]));
    if (name == "gaussian" && args.size() == 2) return line_gaussian(g, std::stod(args[0]), std::stod(args[1]));
    if (name == "file" && args.size() == 1) return read_line(g, args[0]);
    throw InvalidConfig("unknown " + key + " entry '" + name + "'");
  }

  BoundaryData boundary(const LatticeGrid& g) const { return {line(g, "data.f", seed_ + 1), line(g, "data.g", seed_ + 2)}; }

  static std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot read data file " + path);
    std::string header;
    std::getline(in, header);
    return in;
  }

  /// Reads `m1,m2,re,im` rows; unlisted points are zero.
  static GridFunction read_grid(const LatticeGrid& g, const std::string& path) {
    auto in = open_input(path);
    GridFunction u(g);
    int a, b;
    double re, im;
    char c1, c2, c3;
    while (in >> a >> c1 >> b >> c2 >> re >> c3 >> im) {
      if (a < g.first() || a > g.last() || b < g.first() || b > g.last()) throw InvalidConfig("data file index outside the window: " + path);
      u(a, b) = {re, im};
    }
    return u;
  }

  /// Reads `m,re,im` rows; unlisted points are zero.
  static LineFunction read_line(const LatticeGrid& g, const std::string& path) {
    auto in = open_input(path);
    LineFunction u(g);
    int m;
    double re, im;
    char c1, c2;
    while (in >> m >> c1 >> re >> c2 >> im) {
      if (m < g.first() || m > g.last()) throw InvalidConfig("data file index outside the window: " + path);
      u(m) = {re, im};
    }
    return u;
  }

  // --- output helpers ---

  std::ofstream csv(const std::string& name) const {
    std::ofstream os(out_ / name);
    os << std::setprecision(10);
    return os;
  }

  template <class F>
  void dump(const std::string& stem, const F& u, Quadrant q) const {
    std::ofstream os(out_ / (stem + ".csv"));
    write_csv(os, u);
    std::ofstream meta(out_ / (stem + ".meta"));
    write_metadata(meta, u.grid(), q);
    meta << "seed = " << seed_ << '\n';
  }

  void summary(const std::string& problem, const std::vector<SolverReport>& rows) const {
    double res = 0.0, lo = 1e300, hi = 0.0;
    for (const auto& r : rows) {
      res = std::max(res, r.residual);
      lo = std::min(lo, r.apriori_ratio);
      hi = std::max(hi, r.apriori_ratio);
    }
    auto os = csv("summary.csv");
    os << "problem,rows,max_residual,apriori_drift\n" << problem << ',' << rows.size() << ',' << res << ',' << (lo > 0.0 ? hi / lo - 1.0 : 0.0) << '\n';
  }

  // --- commands ---

  int solve_unique_cmd() {
    const double s = cfg_.require<double>("problem.s");
    const Quadrant q = convention();
    auto os = csv("report.csv");
    write_solver_header(os);
    std::vector<SolverReport> rows;
    for (double h : steps()) {
      const auto g = grid_for(h);
      const auto r = solve_unique(factorization(g), s, rhs(g), q);
      write_solver_row(os, r.report);
      rows.push_back(r.report);
      dump("u", r.u, q);
    }
    summary("unique", rows);
    return 0;
  }

  int general_solution_cmd() {
    const double s = cfg_.require<double>("problem.s");
    const int n = cfg_.get<int>("problem.n", 1);
    const double c = cfg_.get<double>("problem.layer_c", 4.0);
    const int trials = cfg_.get<int>("problem.trials", 1);
    if (trials < 1) throw InvalidConfig("problem.trials must be positive");
    auto os = csv("report.csv");
    write_solver_header(os);
    std::vector<SolverReport> rows;
    std::vector<GridFunction> sols;
    for (double h : steps()) {
      const auto g = grid_for(h);
      const auto fact = factorization(g);
      const auto v = rhs(g);
      sols.clear();
      for (int t = 0; t < trials; ++t) {
        const auto r = general_solution(fact, s, v, acceptance::random_layers(g, n, c, seed_ + 10 * t));
        write_solver_row(os, r.report);
        if (t == 0) rows.push_back(r.report);
        sols.push_back(r.u);
      }
    }
    for (int t = 0; t < trials; ++t) dump("u_trial" + std::to_string(t), sols[t], Quadrant::closed);
    auto diff = csv("differences.csv");
    diff << "trial_a,trial_b,max_diff\n";
    for (int a = 0; a < trials; ++a)
      for (int b = a + 1; b < trials; ++b) diff << a << ',' << b << ',' << (sols[a] - sols[b]).max_abs() << '\n';
    summary("general", rows);
    return 0;
  }

  int dirichlet_cmd() {
    const double s = cfg_.require<double>("problem.s");
    auto os = csv("report.csv");
    write_solver_header(os);
    auto ds = csv("dirichlet.csv");
    ds << "h,N,system_residual,trace_err,cond,multiplier_abs\n";
    for (double h : steps()) {
      const auto g = grid_for(h);
      const auto bd = boundary(g);
      const auto r = dirichlet_solve(dirichlet_assemble(factorization(g), s, bd), bd);
      write_solver_row(os, r.report);
      ds << g.h() << ',' << g.half() << ',' << r.system_residual << ',' << r.trace_err << ',' << r.cond << ',' << std::abs(r.multiplier)
         << '\n';
      dump("u", r.u, Quadrant::closed);
    }
    return 0;
  }

  int nonlocal_cmd() {
    const double s = cfg_.require<double>("problem.s");
    auto os = csv("report.csv");
    write_solver_header(os);
    auto ns = csv("nonlocal.csv");
    ns << "h,N,transformed_err,spatial_err\n";
    std::vector<SolverReport> rows;
    for (double h : steps()) {
      const auto g = grid_for(h);
      const auto r = solve_nonlocal(factorization(g), s, boundary(g));
      write_solver_row(os, r.report);
      ns << g.h() << ',' << g.half() << ',' << r.transformed_err << ',' << r.spatial_err << '\n';
      rows.push_back(r.report);
      dump("u", r.u, Quadrant::closed);
    }
    summary("nonlocal", rows);
    return 0;
  }

  int project_cmd() {
    const Quadrant q = convention();
    const auto g = grid_for(cfg_.get<double>("grid.h", 0.25));
    const auto s = dft_forward(rhs(g));
    const auto names = dpde::detail::split_top_level(cfg_.get<std::string>("projector.realizations", "spatial,kernel_quadrature"), ',');
    const auto eps = cfg_.list("projector.eps_hbar", {1e-1, 1e-2, 1e-3});
    auto os = csv("projector.csv");
    write_projector_header(os);
    for (const auto& name : names) {
      if (name == "spatial") {
        write_projector_row(os, projector_diagnostics(s, {q, Realization::spatial, 0.0, 0}));
      } else if (name == "kernel_quadrature") {
        for (double e : eps) write_projector_row(os, projector_diagnostics(s, {q, Realization::kernel_quadrature, e * g.hbar(), 0}));
      } else {
        throw InvalidConfig("unknown realization '" + name + "'");
      }
    }
    dump("plus", project_plus(s, {q, Realization::spatial, 0.0, 0}), q);
    return 0;
  }

  int factorize_cmd() {
    const auto g = grid_for(cfg_.get<double>("grid.h", 0.25));
    const double scale = cfg_.get<double>("problem.scale", 0.5);
    const int trials = cfg_.get<int>("problem.trials", 1);
    if (trials < 1) throw InvalidConfig("problem.trials must be positive");
    auto os = csv("factorization.csv");
    os << "seed,scale,h,N,reconstruction_err,support_tolerance,homomorphism_err\n";
    for (int t = 0; t < trials; ++t) {
      const unsigned seed = seed_ + t;
      const auto f = two_quadrant_random(g, seed, scale);
      const auto w = exp_split_factorize(f);
      auto target = dft_forward(f);
      for (auto& v : target.values()) v = std::exp(v);
      const auto f1 = two_quadrant_random(g, seed, 0.8 * scale);
      const auto f2 = two_quadrant_random(g, seed + 100, 0.8 * scale);
      const auto w12 = exp_split_factorize(f1 + f2);
      const auto w1 = exp_split_factorize(f1), w2 = exp_split_factorize(f2);
      const double hom = std::max(acceptance::detail::rel_max(w12.plus.values(), w1.plus.values() * w2.plus.values()),
                                  acceptance::detail::rel_max(w12.minus.values(), w1.minus.values() * w2.minus.values()));
      os << seed << ',' << scale << ',' << g.h() << ',' << g.half() << ',' << acceptance::detail::rel_max(w.symbol().values(), target)
         << ',' << w.support_tolerance << ',' << hom << '\n';
      if (t == 0) {
        dump("plus", w.plus.values(), Quadrant::closed);
        dump("minus", w.minus.values(), Quadrant::closed);
      }
    }
    return 0;
  }

  int certify_cmd() {
    WeightMode mode;
    try {
      mode = weight_mode_from_string(cfg_.get<std::string>("symbol.weight_mode", "modulus_sum"));
    } catch (const std::invalid_argument& e) {
      throw InvalidConfig(e.what());
    }
    const auto name = factorization_name();
    const auto hs = cfg_.has("grid.h_list") ? cfg_.list("grid.h_list", {}) : std::vector<double>{cfg_.get<double>("grid.h", 0.25)};
    const auto rows = certify_order_sweep([&](const LatticeGrid& g) { return factorization(g).symbol(); }, hs, half_length(), mode);
    auto os = csv("certificate.csv");
    os << "symbol,h,N,weight_mode,c1,c2,ratio\n";
    for (const auto& r : rows)
      os << '"' << name << "\"," << r.h << ',' << window_points(r.h, half_length()) << ',' << to_string(mode) << ',' << r.cert.c1
         << ',' << r.cert.c2 << ',' << r.cert.ratio() << '\n';
    auto ds = csv("drift.csv");
    ds << "symbol,steps,drift\n\"" << name << "\"," << rows.size() << ',' << certificate_drift(rows) << '\n';
    return 0;
  }

  int oracle_cmd() {
    const double s = cfg_.require<double>("problem.s");
    const Quadrant q = convention();
    const auto g = grid_for(cfg_.get<double>("grid.h", 0.25));
    const auto fact = factorization(g);
    const auto v = rhs(g);
    const auto u = solve_unique(fact, s, v, q).u;
    auto os = csv("oracle.csv");
    write_oracle_header(os);
    for (double m : cfg_.list("problem.M_list", {8, 16, 32})) {
      const int M = static_cast<int>(m);
      if (M != m) throw InvalidConfig("problem.M_list entries must be integers");
      const auto p = assemble_dense(fact.symbol(), M, q, &v);
      const auto d = dense_solve(p);
      write_oracle_row(os, {M, g.half(), g.h(), factorization_name(), interior_error(d.u, u, p), d.cond});
    }
    dump("u", u, q);
    return 0;
  }

  int convergence_cmd() {
    ContinuousFactor cf;
    ContinuousBoundaryData data;
    try {
      cf = continuum_factor(cfg_.get<std::string>("continuum.factor", "separable(1,1.5,2)"));
      data = continuum_data(cfg_.get<std::string>("continuum.data", "gaussian"));
    } catch (const std::invalid_argument& e) {
      throw InvalidConfig(e.what());
    }
    const auto hs = cfg_.list("grid.h_list", {0.125, 0.0625, 0.03125, 0.015625});
    const auto pts = cfg_.list("continuum.points", {0.5, 6.0, 0.5});
    if (pts.size() != 3) throw InvalidConfig("continuum.points must be lo,hi,step");
    if (data.f) {
      const auto st = convergence_study(cf, data, hs, cfg_.get<double>("grid.half_length", 16.0), study_points(pts[0], pts[1], pts[2]));
      auto os = csv("study.csv");
      write_study_header(os);
      for (const auto& r : st.rows) write_study_row(os, r);
      auto fit = csv("fit.csv");
      fit << "beta,r_squared\n" << st.beta << ',' << st.r_squared << '\n';
    }
    auto co = csv("coincidence.csv");
    co << "h,N,spectral_coincidence\n";
    if (!data.f)
      for (double h : hs) {
        const LatticeGrid g(h, window_points(h, cfg_.get<double>("grid.half_length", 8.0)));
        co << h << ',' << g.half() << ',' << spectral_coincidence(cf, data, g) << '\n';
      }
    return 0;
  }

  int acceptance_cmd() {
    const auto r = acceptance::run_criterion(cfg_.require<int>("run.criterion"));
    std::cout << acceptance::format_line(r) << '\n';
    auto os = csv("acceptance.csv");
    os << "criterion,name,pass,detail\n" << r.id << ",\"" << r.name << "\"," << (r.pass ? "PASS" : "FAIL") << ",\"" << r.detail << "\"\n";
    return r.pass ? 0 : kExitFailed;
  }

  Config cfg_;
  fs::path out_;
  unsigned seed_;
};

void write_rejection(const fs::path& out, const std::string& kind, const std::string& msg) {
  std::error_code ec;
  fs::create_directories(out, ec);
  std::ofstream os(out / "rejection.txt");
  os << kind << ": " << msg << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digital pseudo-differential experiments on the lattice quadrant"};
  std::string config_path, out_dir, command;
  std::optional<unsigned> seed;
  std::vector<std::string> overrides;
  app.add_option("command", command, "command (overrides run.command)");
  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "seed for random data (overrides run.seed)");
  app.add_option("--override", overrides, "section.key=value, repeatable");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalidConfig;
  }

  fs::path out;
  try {
    pt::ptree tree;
    if (!config_path.empty()) pt::read_ini(config_path, tree);
    Config cfg(std::move(tree));
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw InvalidConfig("override must be key=value: " + o);
      cfg.put(dpde::detail::trim(o.substr(0, eq)), dpde::detail::trim(o.substr(eq + 1)));
    }
    if (seed) cfg.put("run.seed", std::to_string(*seed));
    if (!command.empty()) cfg.put("run.command", command);
    if (!out_dir.empty()) cfg.put("output.dir", out_dir);
    out = cfg.get<std::string>("output.dir", "out");
    const auto cmd = cfg.require<std::string>("run.command");
    Runner runner(std::move(cfg), out);
    return runner.run(cmd);
  } catch (const UnknownCommand& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnknownCommand;
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const pt::ptree_error& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition rejected: " << e.what() << '\n';
    write_rejection(out, "precondition", e.what());
    return kExitPrecondition;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    write_rejection(out, "numerical", e.what());
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}
