#pragma once

// Spectral solution procedures for the quadrant problems: operator
// application, the unique solve, the general solution with layer functions,
// the Dirichlet reduction to a block system, and the nonlocal problem.

#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpde/errors.hpp"
#include "dpde/lattice.hpp"
#include "dpde/projector.hpp"
#include "dpde/sobolev.hpp"
#include "dpde/symbols.hpp"

namespace dpde {

struct DigitalOperator {
  PeriodicSymbol symbol;
  const LatticeGrid& grid() const { return symbol.grid(); }
};

inline GridFunction apply_operator(const DigitalOperator& op, const GridFunction& u) {
  require_same_grid(op.grid(), u.grid());
  return dft_inverse(op.symbol.values() * dft_forward(u));
}

inline DigitalOperator make_operator(const WaveFactorization& f) { return {f.symbol()}; }

struct SolverReport {
  std::string problem;
  double h = 0.0;
  int N = 0;
  double s = 0.0;
  double kappa = 0.0;
  double residual = 0.0;
  double exterior_mass = 0.0;
  double apriori_ratio = 0.0;
  double cond = 0.0;
};

inline void write_solver_header(std::ostream& os) { os << "problem,h,N,s,kappa,residual,exterior_mass,apriori_ratio,cond\n"; }

inline void write_solver_row(std::ostream& os, const SolverReport& r) {
  os << r.problem << ',' << r.h << ',' << r.N << ',' << r.s << ',' << r.kappa << ',' << r.residual << ','
     << r.exterior_mass << ',' << r.apriori_ratio << ',' << r.cond << '\n';
}

struct SolveResult {
  GridFunction u;
  SolverReport report;
};

namespace detail {

inline void require_window(double kappa, double s, int n, const std::string& what) {
  const double delta = kappa - s - n;
  if (!(std::abs(delta) < 0.5)) {
    std::ostringstream os;
    os << what << ": kappa - s = " << kappa - s << " is outside (" << n - 0.5 << ", " << n + 0.5 << ")";
    throw PreconditionError(os.str());
  }
}

/// Max of |A u - v| over {m1 >= shift, m2 >= shift}, relative to max(|v|, |A u|).
inline double quadrant_residual(const GridFunction& au, const GridFunction& v, int shift) {
  const auto& g = au.grid();
  double num = 0.0;
  for (int a = std::max(shift, g.first()); a <= g.last(); ++a)
    for (int b = std::max(shift, g.first()); b <= g.last(); ++b) num = std::max(num, std::abs(au(a, b) - v(a, b)));
  const double den = std::max(v.max_abs(), au.max_abs());
  return den == 0.0 ? num : num / den;
}

inline double relative_exterior(const GridFunction& u) {
  const double mx = u.max_abs();
  return mx == 0.0 ? 0.0 : exterior_max(u, Quadrant::closed) / mx;
}

inline void require_supported(const GridFunction& v, Quadrant q, const std::string& what) {
  const double mx = v.max_abs();
  if (mx > 0.0 && exterior_max(v, q) > 1e-13 * mx)
    throw PreconditionError(what + " has support outside the quadrant");
}

inline SpectrumFunction reciprocal(const SpectrumFunction& s) {
  auto out = s;
  for (auto& v : out.values()) {
    if (v == cplx{}) throw NumericalError("symbol vanishes at a frequency node");
    v = 1.0 / v;
  }
  return out;
}

}  // namespace detail

/// Continuation of right-hand sides from the quadrant to the whole lattice:
/// zero extension plus an optional tail supported outside the quadrant.
struct Continuation {
  std::optional<GridFunction> tail;
};

inline GridFunction continue_rhs(const GridFunction& v, const Continuation& ell, Quadrant q) {
  if (!ell.tail) return v;
  require_same_grid(v.grid(), ell.tail->grid());
  const auto& t = *ell.tail;
  const auto& g = v.grid();
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b)
      if (in_quadrant(a, b, q) && t(a, b) != cplx{}) throw PreconditionError("continuation tail overlaps the quadrant");
  return v + t;
}

/// u~ = plus^-1 P_+(minus^-1 (ell v)~).
inline SolveResult solve_unique(const WaveFactorization& fact, double s, const GridFunction& v,
                                Quadrant conv = Quadrant::closed, const Continuation& ell = {}) {
  require_same_grid(fact.grid(), v.grid());
  detail::require_window(fact.index, s, 0, "unique solve");
  detail::require_supported(v, conv, "right-hand side");
  const auto lv = dft_forward(continue_rhs(v, ell, conv));
  const auto w = detail::reciprocal(fact.minus.values()) * lv;
  const auto ut = detail::reciprocal(fact.plus.values()) * project_plus(w, {conv});
  auto u = dft_inverse(ut);
  const auto& g = v.grid();
  SolverReport r{"unique", g.h(), g.half(), s, fact.index};
  const auto au = apply_operator(make_operator(fact), u);
  r.residual = detail::quadrant_residual(au, v, conv == Quadrant::closed ? 0 : 1);
  r.exterior_mass = detail::relative_exterior(u);
  const double vn = norm_hs_plus(v, {s - fact.order(), WeightMode::modulus_sum}, conv);
  r.apriori_ratio = vn == 0.0 ? 0.0 : norm_hs(ut, {s, WeightMode::modulus_sum}) / vn;
  return {std::move(u), r};
}

/// Q_n, the layer count n and the layer spectra c~_k(xi1), d~_k(xi2), k = 0..n-1.
struct GeneralSolutionSpec {
  int n;
  QnPolynomial qn;
  std::vector<LineSpectrum> c;
  std::vector<LineSpectrum> d;
};

/// Class exponent of the k-th layer function.
inline double layer_class(double s, double kappa, int k) { return s - kappa + k + 0.5; }

inline GeneralSolutionSpec zero_layers(const LatticeGrid& g, int n, double c) {
  return {n, make_qn(g, n, c), std::vector<LineSpectrum>(n, LineSpectrum(g)), std::vector<LineSpectrum>(n, LineSpectrum(g))};
}

/// u~ = plus^-1 Q_n P_+(Q_n^-1 minus^-1 (ell v)~) + plus^-1 sum_k (c~_k(xi1) zeta2^k + d~_k(xi2) zeta1^k).
/// The residual is measured on {m1 >= n, m2 >= n}.
inline SolveResult general_solution(const WaveFactorization& fact, double s, const GridFunction& v,
                                    const GeneralSolutionSpec& spec, const Continuation& ell = {}) {
  const auto& g = v.grid();
  require_same_grid(fact.grid(), g);
  if (spec.n < 1) throw PreconditionError("general solution needs n >= 1");
  if (static_cast<int>(spec.c.size()) != spec.n || static_cast<int>(spec.d.size()) != spec.n)
    throw PreconditionError("general solution needs exactly n layer functions of each kind");
  detail::require_window(fact.index, s, spec.n, "general solution");
  if (spec.qn.n != spec.n || spec.qn.symbol.declared_order() != spec.n)
    throw PreconditionError("Q_n order does not match n");
  if (!(certify_order(spec.qn.symbol, WeightMode::modulus_sum).c1 > 0.0))
    throw PreconditionError("Q_n fails the order certificate on this grid");
  detail::require_supported(v, Quadrant::closed, "right-hand side");

  const auto& q = spec.qn.symbol.values();
  const auto inv_plus = detail::reciprocal(fact.plus.values());
  const auto w = detail::reciprocal(q) * (detail::reciprocal(fact.minus.values()) * dft_forward(continue_rhs(v, ell, Quadrant::closed)));
  auto ut = inv_plus * (q * project_plus(w));
  SpectrumFunction layers(g);
  double layer_norm = 0.0;
  for (int k = 0; k < spec.n; ++k) {
    require_same_grid(spec.c[k].grid(), g);
    require_same_grid(spec.d[k].grid(), g);
    for (int a = g.first(); a <= g.last(); ++a)
      for (int b = g.first(); b <= g.last(); ++b)
        layers(a, b) += spec.c[k](a) * std::pow(zeta(g.h(), g.freq(b)), k) + spec.d[k](b) * std::pow(zeta(g.h(), g.freq(a)), k);
    const double sk = layer_class(s, fact.index, k);
    layer_norm += norm_1d(spec.c[k], sk) + norm_1d(spec.d[k], sk);
  }
  ut += inv_plus * layers;
  auto u = dft_inverse(ut);
  SolverReport r{"general", g.h(), g.half(), s, fact.index};
  r.residual = detail::quadrant_residual(apply_operator(make_operator(fact), u), v, spec.n);
  r.exterior_mass = detail::relative_exterior(u);
  const double den = norm_hs_plus(v, {s - fact.order(), WeightMode::modulus_sum}, Quadrant::closed) + layer_norm;
  r.apriori_ratio = den == 0.0 ? 0.0 : norm_hs(ut, {s, WeightMode::modulus_sum}) / den;
  return {std::move(u), r};
}

/// f on the x2-axis window, g on the x1-axis window.
struct BoundaryData {
  LineFunction f;
  LineFunction g;
};

namespace detail {

inline void require_half_line(const LineFunction& c, const std::string& what) {
  const auto& g = c.grid();
  const double mx = c.max_abs();
  for (int m = g.first(); m < 0; ++m)
    if (std::abs(c(m)) > 1e-13 * mx) throw PreconditionError(what + " is not supported on the nonnegative half-line");
  if (decay_diagnostic(c) > 1e-10) throw PreconditionError(what + " does not decay inside the window");
}

inline double max_rel(double num, double den) { return den == 0.0 ? num : num / den; }

}  // namespace detail

/// The spectral solution formula of the nonlocal problem, without any checks.
inline SpectrumFunction nonlocal_spectrum(const WaveFactorization& fact, const LineSpectrum& ft, const LineSpectrum& gt) {
  const auto& plus = fact.plus.values();
  return SpectrumFunction::sample(fact.grid(), [&](int a, int b) { return (plus(a, 0) * gt(a) + plus(0, b) * ft(b)) / plus(a, b); });
}

struct NonlocalResult {
  GridFunction u;
  SolverReport report;
  /// max deviation in u~(0,xi2) = f~, u~(xi1,0) = g~, u~(0,0) = 0
  double transformed_err;
  /// max deviation in the h-weighted row and column sums and the total sum
  double spatial_err;
};

/// u~ = plus^-1(xi) (plus(xi1,0) g~(xi1) + plus(0,xi2) f~(xi2)).
inline NonlocalResult solve_nonlocal(const WaveFactorization& fact, double s, const BoundaryData& bd) {
  const auto& g = fact.grid();
  require_same_grid(bd.f.grid(), g);
  require_same_grid(bd.g.grid(), g);
  detail::require_window(fact.index, s, 1, "nonlocal problem");
  detail::require_half_line(bd.f, "f");
  detail::require_half_line(bd.g, "g");
  const auto ft = dft_forward(bd.f);
  const auto gt = dft_forward(bd.g);
  const double scale = std::max(ft.max_abs(), gt.max_abs());
  if (std::abs(ft(0)) > 1e-10 * scale || std::abs(gt(0)) > 1e-10 * scale) {
    std::ostringstream os;
    os << "compatibility requires f~(0) = g~(0) = 0; measured f~(0) = " << ft(0) << ", g~(0) = " << gt(0);
    throw PreconditionError(os.str());
  }
  auto ut = nonlocal_spectrum(fact, ft, gt);

  double terr = std::abs(ut(0, 0));
  for (int k = g.first(); k <= g.last(); ++k) terr = std::max({terr, std::abs(ut(0, k) - ft(k)), std::abs(ut(k, 0) - gt(k))});
  terr = detail::max_rel(terr, scale);

  auto u = dft_inverse(ut);
  const double h = g.h();
  const double fscale = std::max(bd.f.max_abs(), bd.g.max_abs());
  double serr = 0.0;
  cplx total{};
  for (int a = g.first(); a <= g.last(); ++a) {
    cplx row{}, col{};
    for (int b = 0; b <= g.last(); ++b) {
      row += u(b, a) * h;
      col += u(a, b) * h;
    }
    serr = std::max({serr, std::abs(row - bd.f(a)), std::abs(col - bd.g(a))});
  }
  for (int a = 0; a <= g.last(); ++a)
    for (int b = 0; b <= g.last(); ++b) total += u(a, b) * h * h;
  serr = std::max(serr, std::abs(total));
  serr = detail::max_rel(serr, fscale);

  SolverReport r{"nonlocal", h, g.half(), s, fact.index};
  r.residual = detail::quadrant_residual(apply_operator(make_operator(fact), u), GridFunction(g), 1);
  r.exterior_mass = detail::relative_exterior(u);
  const double den = norm_1d(ft, s + 0.5) + norm_1d(gt, s + 0.5);
  r.apriori_ratio = den == 0.0 ? 0.0 : norm_hs(ut, {s, WeightMode::modulus_sum}) / den;
  if (!(terr <= 1e-12)) throw NumericalError("transformed boundary conditions violated: " + std::to_string(terr));
  return {std::move(u), r, terr, serr};
}

/// Dense discretization of the two coupled integral equations for the layer
/// functions c~_0(xi1), d~_0(xi2) of u~ = plus^-1 (c~_0(xi1) + d~_0(xi2)):
///   c~_0(xi1) + sum_xi2 M2 d~_0 dxi = G~(xi1),  d~_0(xi2) + sum_xi1 M1 c~_0 dxi = F~(xi2).
/// Unknown vector [c~_0 over xi1 slots, d~_0 over xi2 slots].
struct DirichletSystem {
  LatticeGrid grid;
  double s;
  double kappa;
  SpectrumFunction inv_plus;
  LineSpectrum a0;  // over xi2
  LineSpectrum b0;  // over xi1
  LineSpectrum F;
  LineSpectrum G;
  Eigen::MatrixXcd M1;  // (xi1 slot, xi2 slot)
  Eigen::MatrixXcd M2;  // (xi1 slot, xi2 slot)
  Eigen::MatrixXcd S;
  Eigen::VectorXcd rhs;
};

inline DirichletSystem dirichlet_assemble(const WaveFactorization& fact, double s, const BoundaryData& bd) {
  const auto& g = fact.grid();
  require_same_grid(bd.f.grid(), g);
  require_same_grid(bd.g.grid(), g);
  detail::require_window(fact.index, s, 1, "Dirichlet problem");
  const double bscale = std::max(bd.f.max_abs(), bd.g.max_abs());
  if (std::abs(bd.f(0) - bd.g(0)) > 1e-10 * bscale) {
    std::ostringstream os;
    os << "Dirichlet data disagree at the corner: f(0) = " << bd.f(0) << ", g(0) = " << bd.g(0);
    throw PreconditionError(os.str());
  }
  const int L = g.size();
  const double dxi = g.dxi();
  DirichletSystem sys{g, s, fact.index, detail::reciprocal(fact.plus.values()), LineSpectrum(g), LineSpectrum(g),
                      LineSpectrum(g), LineSpectrum(g), Eigen::MatrixXcd(L, L), Eigen::MatrixXcd(L, L),
                      Eigen::MatrixXcd::Zero(2 * L, 2 * L), Eigen::VectorXcd(2 * L)};
  const auto& ip = sys.inv_plus;
  LineSpectrum a0_mod(g), b0_mod(g);
  for (int k = g.first(); k <= g.last(); ++k)
    for (int j = g.first(); j <= g.last(); ++j) {
      sys.a0(k) += ip(j, k) * dxi;
      sys.b0(k) += ip(k, j) * dxi;
      a0_mod(k) += std::abs(ip(j, k)) * dxi;
      b0_mod(k) += std::abs(ip(k, j)) * dxi;
    }
  // compare against the integral of |A^-1|, so a forced zero is caught even when it holds everywhere
  auto check = [&](const LineSpectrum& x, const LineSpectrum& mod, const char* name) {
    for (int k = g.first(); k <= g.last(); ++k)
      if (!(std::abs(x(k)) >= 1e-10 * mod(k).real())) {
        std::ostringstream os;
        os << "singular assembly: |" << name << "| = " << std::abs(x(k)) << " at frequency index " << k
           << " against integral of |A^-1| = " << mod(k).real();
        throw NumericalError(os.str());
      }
  };
  check(sys.a0, a0_mod, "a0");
  check(sys.b0, b0_mod, "b0");
  const auto ft = dft_forward(bd.f);
  const auto gt = dft_forward(bd.g);
  for (int k = g.first(); k <= g.last(); ++k) {
    sys.F(k) = 2.0 * pi * ft(k) / sys.a0(k);
    sys.G(k) = 2.0 * pi * gt(k) / sys.b0(k);
  }
  for (int k1 = g.first(); k1 <= g.last(); ++k1)
    for (int k2 = g.first(); k2 <= g.last(); ++k2) {
      const int i = g.slot(k1), j = g.slot(k2);
      sys.M1(i, j) = ip(k1, k2) / sys.a0(k2);
      sys.M2(i, j) = ip(k1, k2) / sys.b0(k1);
    }
  for (int i = 0; i < L; ++i) {
    sys.S(i, i) = 1.0;
    sys.S(L + i, L + i) = 1.0;
    for (int j = 0; j < L; ++j) {
      sys.S(i, L + j) = sys.M2(i, j) * dxi;
      sys.S(L + j, i) = sys.M1(i, j) * dxi;
    }
  }
  for (int k = g.first(); k <= g.last(); ++k) {
    sys.rhs(g.slot(k)) = sys.G(k);
    sys.rhs(L + g.slot(k)) = sys.F(k);
  }
  return sys;
}

struct DirichletResult {
  LineSpectrum c0;
  LineSpectrum d0;
  GridFunction u;
  double system_residual;
  double trace_err;
  double cond;
  /// Lagrange multiplier of the gauge row; nonzero flags inconsistent data.
  cplx multiplier;
  SolverReport report;
};

/// Solve the system bordered by the gauge d0(x2 = 0) = 0, rebuild u and verify
/// both traces.
inline DirichletResult dirichlet_solve(const DirichletSystem& sys, const BoundaryData& bd) {
  const auto& g = sys.grid;
  const int L = g.size();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(2 * L + 1, 2 * L + 1);
  B.topLeftCorner(2 * L, 2 * L) = sys.S;
  for (int j = 0; j < L; ++j) B(L + j, 2 * L) = B(2 * L, L + j) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * L + 1);
  rhs.head(2 * L) = sys.rhs;
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= 1e12)) throw NumericalError("Dirichlet system is singular: cond = " + std::to_string(cond));
  const Eigen::VectorXcd x = B.partialPivLu().solve(rhs);
  const Eigen::VectorXcd xs = x.head(2 * L);
  const double rn = sys.rhs.norm();
  const double res = detail::max_rel((sys.S * xs - sys.rhs).norm(), rn);

  DirichletResult out{LineSpectrum(g), LineSpectrum(g), GridFunction(g), res, 0.0, cond, x(2 * L), {}};
  for (int k = g.first(); k <= g.last(); ++k) {
    out.c0(k) = xs(g.slot(k));
    out.d0(k) = xs(L + g.slot(k));
  }
  auto ut = SpectrumFunction::sample(g, [&](int a, int b) { return sys.inv_plus(a, b) * (out.c0(a) + out.d0(b)); });
  out.u = dft_inverse(ut);
  double terr = 0.0;
  for (int m = g.first(); m <= g.last(); ++m)
    terr = std::max({terr, std::abs(out.u(0, m) - bd.f(m)), std::abs(out.u(m, 0) - bd.g(m))});
  out.trace_err = detail::max_rel(terr, std::max(bd.f.max_abs(), bd.g.max_abs()));
  out.report = {"dirichlet", g.h(), g.half(), sys.s, sys.kappa, res, detail::relative_exterior(out.u), 0.0, cond};
  if (!(out.trace_err <= 1e-6)) throw NumericalError("Dirichlet traces not reproduced: " + std::to_string(out.trace_err));
  return out;
}

}  // namespace dpde
