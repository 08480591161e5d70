#pragma once

// Comparison of lattice solutions with their continuous counterparts: the
// lifting l_h, restriction of continuous factors to the frequency torus, the
// continuous nonlocal solution by quadrature, and the h-convergence study.

#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "dpde/errors.hpp"
#include "dpde/lattice.hpp"
#include "dpde/solvers.hpp"
#include "dpde/symbols.hpp"

namespace dpde {

using LineFn = std::function<cplx(double)>;

/// Separable plus factor A(xi) = p1(xi1) p2(xi2), minus factor 1.
struct ContinuousFactor {
  LineFn p1;
  LineFn p2;
  double kappa;
  /// decay exponent of 1/p_k along each axis
  double gamma;
  std::string name;

  cplx operator()(double xi1, double xi2) const { return p1(xi1) * p2(xi2); }
};

/// (a + i xi1)^p (b + i xi2)^p, analytic and nonvanishing for Im xi_k < 0.
inline ContinuousFactor separable_factor(double a, double b, int p) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("separable factor needs a, b > 0");
  if (p < 1) throw std::invalid_argument("separable factor needs p >= 1");
  return {[a, p](double x) { return std::pow(cplx{a, x}, p); }, [b, p](double x) { return std::pow(cplx{b, x}, p); },
          static_cast<double>(p), static_cast<double>(p),
          "separable(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(p) + ")"};
}

inline ContinuousFactor constant_factor() {
  return {[](double) { return cplx{1.0}; }, [](double) { return cplx{1.0}; }, 0.0, 0.0, "constant"};
}

/// Boundary data with closed-form transforms; `band` bounds the frequencies
/// where the transforms are non-negligible.
struct ContinuousBoundaryData {
  LineFn f;
  LineFn g;
  LineFn ft;
  LineFn gt;
  double band;
};

/// (x - c) e^{-(x - c)^2 / (2 v)} and its transform -i v xi sqrt(2 pi v) e^{-v xi^2/2} e^{-i c xi}.
inline std::pair<LineFn, LineFn> odd_gaussian(double c, double v) {
  LineFn f = [c, v](double x) { return cplx{(x - c) * std::exp(-(x - c) * (x - c) / (2 * v))}; };
  LineFn ft = [c, v](double xi) {
    return -I * v * xi * std::sqrt(2 * pi * v) * std::exp(-v * xi * xi / 2) * std::exp(-I * c * xi);
  };
  return {f, ft};
}

/// Catalog data: odd Gaussians centered at 5, so both transforms vanish at 0
/// and the mass on x < 0 is below 1e-13.
inline ContinuousBoundaryData gaussian_boundary_data() {
  auto [f, ft] = odd_gaussian(5.0, 0.16);
  auto [g, gt] = odd_gaussian(5.0, 0.25);
  return {f, g, ft, gt, 30.0};
}

/// Transforms xi (1 - (xi/B)^2)^4 e^{-2i xi} on |xi| < B, zero outside.
inline ContinuousBoundaryData bandlimited_boundary_data(double B) {
  LineFn ft = [B](double xi) {
    if (std::abs(xi) >= B) return cplx{};
    return xi * std::pow(1 - xi * xi / (B * B), 4) * std::exp(-2.0 * I * xi);
  };
  LineFn gt = [B](double xi) {
    if (std::abs(xi) >= B) return cplx{};
    return cplx{0.5, 0.2} * xi * std::pow(1 - xi * xi / (B * B), 4) * std::exp(-3.0 * I * xi);
  };
  return {nullptr, nullptr, ft, gt, B};
}

// --- quadrature ------------------------------------------------------------

namespace detail {

/// Composite 20-point Gauss-Legendre rule on `panels` equal panels of [lo, hi].
template <class F>
auto gauss_panels(F&& f, double lo, double hi, int panels) -> decltype(f(0.0)) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  decltype(f(0.0)) acc{};
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width, half = width / 2;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        acc += w[i] * half * f(mid);
      } else {
        acc += w[i] * half * (f(mid - half * x[i]) + f(mid + half * x[i]));
      }
    }
  }
  return acc;
}

inline int panels_for(double lo, double hi, double width) { return std::max(1, static_cast<int>(std::ceil((hi - lo) / width))); }

/// Integral over |xi| > B via xi = +-B/t, t in (0, 1].
template <class F>
auto outside(F&& f, double B, int panels) -> decltype(f(0.0)) {
  auto mapped = [&](double t) { return (f(B / t) + f(-B / t)) * (B / (t * t)); };
  return gauss_panels(mapped, 0.0, 1.0, panels);
}

}  // namespace detail

// --- lifting and restriction ---------------------------------------------

/// l_h: restrict a continuous transform to the frequency nodes and invert.
inline LineFunction lift_lh(const LineFn& transform, const LatticeGrid& g) {
  return dft_inverse(LineSpectrum::sample(g, [&](int k) { return transform(g.freq(k)); }));
}

inline GridFunction lift_lh(const std::function<cplx(double, double)>& transform, const LatticeGrid& g) {
  return dft_inverse(SpectrumFunction::sample(g, [&](int a, int b) { return transform(g.freq(a), g.freq(b)); }));
}

/// Samples of the continuous plus factor at the frequency nodes; minus factor 1.
/// The support tolerance is measured, not enforced.
inline WaveFactorization restrict_symbol(const ContinuousFactor& cf, const LatticeGrid& g) {
  auto values = SpectrumFunction::sample(g, [&](int a, int b) { return cf(g.freq(a), g.freq(b)); });
  for (auto v : values.values())
    if (!(std::abs(v) > 0.0) || !std::isfinite(std::abs(v))) throw PreconditionError("continuous factor vanishes on a frequency node");
  return make_factorization(PeriodicSymbol(std::move(values), cf.kappa), PeriodicSymbol::constant(g), cf.kappa);
}

// --- continuous solution -----------------------------------------------------

struct ContinuousSolution {
  std::vector<cplx> values;
  double Lambda;
  /// change of the Richardson-extrapolated values under the last Lambda doubling
  double gap;
};

/// (1/2pi) int_{-L}^{L} p(0)/p(xi) e^{i x xi} d xi.
inline cplx factor_kernel(const LineFn& p, double x, double L) {
  const cplx p0 = p(0.0);
  auto f = [&](double xi) { return p0 / p(xi) * std::exp(I * x * xi); };
  return detail::gauss_panels(f, -L, L, detail::panels_for(-L, L, 0.5)) / (2 * pi);
}

/// (1/2pi) int_{-band}^{band} t(xi) e^{i x xi} d xi.
inline cplx band_inverse(const LineFn& t, double x, double band) {
  auto f = [&](double xi) { return t(xi) * std::exp(I * x * xi); };
  return detail::gauss_panels(f, -band, band, detail::panels_for(-band, band, 0.25)) / (2 * pi);
}

/// u(x) = G(x1) K2(x2) + F(x2) K1(x1): the inverse transform of
/// A^-1(xi)(A(xi1,0) g~(xi1) + A(0,xi2) f~(xi2)) for a separable factor, by
/// iterated quadrature. The factor kernels are integrated over [-L, L] and
/// extrapolated as 2 I(2L) - I(L); L doubles until the extrapolated values
/// change by at most tol relative.
inline ContinuousSolution continuous_solution(const ContinuousFactor& cf, const ContinuousBoundaryData& data,
                                              const std::vector<std::pair<double, double>>& points, double Lambda,
                                              double tol = 1e-6) {
  if (!(Lambda > 0.0)) throw PreconditionError("quadrature cutoff must be positive");
  ContinuousSolution out{std::vector<cplx>(points.size()), Lambda, 0.0};
  std::vector<cplx> G(points.size()), F(points.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    G[i] = band_inverse(data.gt, points[i].first, data.band);
    F[i] = band_inverse(data.ft, points[i].second, data.band);
    scale = std::max({scale, std::abs(G[i]), std::abs(F[i])});
  }
  if (scale == 0.0) return out;
  auto eval = [&](double L) {
    std::map<double, cplx> k1, k2;
    for (const auto& [x1, x2] : points) {
      if (!k1.count(x1)) k1[x1] = 2.0 * factor_kernel(cf.p1, x1, 2 * L) - factor_kernel(cf.p1, x1, L);
      if (!k2.count(x2)) k2[x2] = 2.0 * factor_kernel(cf.p2, x2, 2 * L) - factor_kernel(cf.p2, x2, L);
    }
    std::vector<cplx> v(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) v[i] = G[i] * k2[points[i].second] + F[i] * k1[points[i].first];
    return v;
  };
  double L = Lambda;
  auto prev = eval(L);
  for (int iter = 0; iter < 8; ++iter) {
    auto next = eval(2 * L);
    double gap = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      gap = std::max(gap, std::abs(next[i] - prev[i]));
      mag = std::max(mag, std::abs(next[i]));
    }
    L *= 2;
    out.gap = mag == 0.0 ? gap : gap / mag;
    out.values = std::move(next);
    out.Lambda = L;
    if (out.gap <= tol) return out;
    prev = out.values;
  }
  throw NumericalError("continuous solution quadrature did not converge: gap " + std::to_string(out.gap));
}

/// Continuous spectrum of the nonlocal solution at a frequency.
inline cplx continuous_spectrum(const ContinuousFactor& cf, const ContinuousBoundaryData& data, double xi1, double xi2) {
  return (cf(xi1, 0.0) * data.gt(xi1) + cf(0.0, xi2) * data.ft(xi2)) / cf(xi1, xi2);
}

/// Max relative difference between the lattice spectrum built from lifted
/// data and restricted factors and the continuous spectrum on the nodes.
inline double spectral_coincidence(const ContinuousFactor& cf, const ContinuousBoundaryData& data, const LatticeGrid& g) {
  const auto fact = restrict_symbol(cf, g);
  const auto ud = nonlocal_spectrum(fact, dft_forward(lift_lh(data.ft, g)), dft_forward(lift_lh(data.gt, g)));
  double num = 0.0, den = 0.0;
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) {
      const cplx u = continuous_spectrum(cf, data, g.freq(a), g.freq(b));
      num = std::max(num, std::abs(ud(a, b) - u));
      den = std::max(den, std::abs(u));
    }
  return den == 0.0 ? num : num / den;
}

/// (1/4pi^2) int over R^2 outside [-B, B]^2 of |u~|, B = pi/h.
inline double tail_bound(const ContinuousFactor& cf, const ContinuousBoundaryData& data, double h) {
  const double B = pi / h;
  const double W = std::max(B, data.band);
  auto mod = [&](double x1, double x2) { return std::abs(continuous_spectrum(cf, data, x1, x2)); };
  auto over_line = [&](auto&& f) {
    return detail::gauss_panels(f, -W, W, detail::panels_for(-W, W, 1.0)) + detail::outside(f, W, 16);
  };
  // |xi2| > B, xi1 anywhere
  const double r1 = detail::outside([&](double x2) { return over_line([&](double x1) { return mod(x1, x2); }); }, B, 16);
  // |xi1| > B, |xi2| <= B
  const double r2 = detail::outside(
      [&](double x1) { return detail::gauss_panels([&](double x2) { return mod(x1, x2); }, -B, B, detail::panels_for(-B, B, 1.0)); },
      B, 16);
  return (r1 + r2) / (4 * pi * pi);
}

// --- convergence study -----------------------------------------------------

struct StudyRow {
  double h;
  int N;
  double Lambda;
  double sup_error;
  double tail_bound;
  double fitted_beta_so_far;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double beta;
  double r_squared;
};

/// Least-squares slope of log E against log h and its R^2.
inline std::pair<double, double> fit_rate(const std::vector<double>& hs, const std::vector<double>& es) {
  const std::size_t n = hs.size();
  if (n < 2) return {NAN, NAN};
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(hs[i]);
    my += std::log(es[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(hs[i]) - mx, dy = std::log(es[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double beta = sxy / sxx;
  const double r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return {beta, r2};
}

/// Evaluation points on the lattice of every step in the study.
inline std::vector<std::pair<double, double>> study_points(double lo, double hi, double step) {
  std::vector<std::pair<double, double>> pts;
  for (double a = lo; a <= hi + 1e-12; a += step)
    for (double b = lo; b <= hi + 1e-12; b += step) pts.emplace_back(a, b);
  return pts;
}

/// For each h: lift the data, restrict the factor, solve the lattice problem
/// on a window of fixed half-length, and compare with the continuous solution
/// at the given points (which must be lattice points for every h).
inline StudyResult convergence_study(const ContinuousFactor& cf, const ContinuousBoundaryData& data,
                                     const std::vector<double>& hs, double half_length,
                                     const std::vector<std::pair<double, double>>& points) {
  for (std::size_t i = 1; i < hs.size(); ++i)
    if (!(hs[i] < hs[i - 1])) throw PreconditionError("h list must be strictly decreasing");
  StudyResult out{{}, NAN, NAN};
  std::vector<double> hv, ev;
  for (double h : hs) {
    const LatticeGrid g(h, window_points(h, half_length));
    std::vector<std::pair<int, int>> idx;
    for (const auto& [x1, x2] : points) {
      const double m1 = x1 / h, m2 = x2 / h;
      if (std::abs(m1 - std::round(m1)) > 1e-9 || std::abs(m2 - std::round(m2)) > 1e-9)
        throw PreconditionError("study point is not a lattice point for h = " + std::to_string(h));
      idx.emplace_back(static_cast<int>(std::lround(m1)), static_cast<int>(std::lround(m2)));
    }
    const auto fact = restrict_symbol(cf, g);
    const BoundaryData bd{lift_lh(data.ft, g), lift_lh(data.gt, g)};
    const auto ud = solve_nonlocal(fact, cf.kappa - 1.0, bd).u;
    const auto u = continuous_solution(cf, data, points, std::max(4 * pi / h, 256.0));
    double err = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) err = std::max(err, std::abs(u.values[i] - ud(idx[i].first, idx[i].second)));
    hv.push_back(h);
    ev.push_back(err);
    const auto [beta, r2] = fit_rate(hv, ev);
    out.rows.push_back({h, g.half(), u.Lambda, err, tail_bound(cf, data, h), beta});
    out.beta = beta;
    out.r_squared = r2;
  }
  return out;
}

inline void write_study_header(std::ostream& os) { os << "h,N,Lambda,sup_error,tail_bound,fitted_beta_so_far\n"; }

inline void write_study_row(std::ostream& os, const StudyRow& r) {
  os << r.h << ',' << r.N << ',' << r.Lambda << ',' << r.sup_error << ',' << r.tail_bound << ',' << r.fitted_beta_so_far << '\n';
}

// --- catalog -----------------------------------------------------------------

namespace detail {

inline std::pair<std::string, std::vector<std::string>> parse_call(const std::string& spec) {
  const std::string s = trim(spec);
  const auto open = s.find('(');
  if (open == std::string::npos) return {s, {}};
  if (s.back() != ')') throw std::invalid_argument("malformed catalog entry: " + s);
  return {trim(s.substr(0, open)), split_top_level(s.substr(open + 1, s.size() - open - 2), ',')};
}

}  // namespace detail

/// constant | separable(a,b,p)
inline ContinuousFactor continuum_factor(const std::string& spec) {
  const auto [name, args] = detail::parse_call(spec);
  if (name == "constant" && args.empty()) return constant_factor();
  if (name == "separable" && args.size() == 3) return separable_factor(std::stod(args[0]), std::stod(args[1]), std::stoi(args[2]));
  throw std::invalid_argument("unknown continuum factor: " + spec);
}

/// gaussian | bandlimited(B)
inline ContinuousBoundaryData continuum_data(const std::string& spec) {
  const auto [name, args] = detail::parse_call(spec);
  if (name == "gaussian" && args.empty()) return gaussian_boundary_data();
  if (name == "bandlimited" && args.size() == 1) return bandlimited_boundary_data(std::stod(args[0]));
  throw std::invalid_argument("unknown continuum data: " + spec);
}

}  // namespace dpde
