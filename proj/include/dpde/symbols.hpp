#pragma once

// Periodic symbols, their order certificates, and wave factorizations:
// the exp-split index-0 construction and finite trigonometric plus/minus
// factors of integer index.

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dpde/errors.hpp"
#include "dpde/lattice.hpp"
#include "dpde/sobolev.hpp"

namespace dpde {

class PeriodicSymbol {
 public:
  PeriodicSymbol(SpectrumFunction values, double declared_order)
      : values_(std::move(values)), order_(declared_order) {
    floor_ = 1e300;
    for (auto v : values_.values()) floor_ = std::min(floor_, std::abs(v));
  }

  static PeriodicSymbol constant(const LatticeGrid& g, cplx value = 1.0) {
    return {SpectrumFunction::sample(g, [&](int, int) { return value; }), 0.0};
  }

  const LatticeGrid& grid() const { return values_.grid(); }
  const SpectrumFunction& values() const { return values_; }
  double declared_order() const { return order_; }
  /// min |A_d| over the frequency nodes.
  double ellipticity_floor() const { return floor_; }
  bool elliptic() const { return floor_ > 0.0; }
  cplx operator()(int k1, int k2) const { return values_(k1, k2); }

  PeriodicSymbol inverse() const {
    if (!elliptic()) throw NumericalError("symbol vanishes on the grid; not invertible");
    auto inv = values_;
    for (auto& v : inv.values()) v = 1.0 / v;
    return {std::move(inv), -order_};
  }

 private:
  SpectrumFunction values_;
  double order_;
  double floor_;
};

enum class Side { plus, minus };

/// Max modulus of the inverse transform outside the closed quadrant (plus) or
/// its reflection (minus), relative to the kernel's max modulus.
inline double verify_plus_type(const SpectrumFunction& sym, Side side) {
  const auto k = dft_inverse(sym);
  const double mx = k.max_abs();
  if (mx == 0.0) return 0.0;
  const auto& g = k.grid();
  double out = 0.0;
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) {
      const bool inside = side == Side::plus ? in_quadrant(a, b, Quadrant::closed) : in_minus_quadrant(a, b, Quadrant::closed);
      if (!inside) out = std::max(out, std::abs(k(a, b)));
    }
  return out / mx;
}

inline double verify_plus_type(const PeriodicSymbol& sym, Side side) { return verify_plus_type(sym.values(), side); }

struct WaveFactorization {
  PeriodicSymbol plus;   // extends into the tube over K
  PeriodicSymbol minus;  // extends into the tube over -K
  double index;
  double support_tolerance;

  const LatticeGrid& grid() const { return plus.grid(); }
  double order() const { return plus.declared_order() + minus.declared_order(); }
  PeriodicSymbol symbol() const { return {plus.values() * minus.values(), order()}; }
};

inline WaveFactorization make_factorization(PeriodicSymbol plus, PeriodicSymbol minus, double index) {
  require_same_grid(plus.grid(), minus.grid());
  const double tol = std::max(verify_plus_type(plus, Side::plus), verify_plus_type(minus, Side::minus));
  return {std::move(plus), std::move(minus), index, tol};
}

inline WaveFactorization trivial_factorization(const LatticeGrid& g) {
  return make_factorization(PeriodicSymbol::constant(g), PeriodicSymbol::constant(g), 0.0);
}

/// Split f = chi_+ f + chi_- f and exponentiate the two transforms.
/// Under the closed convention the origin is assigned to the plus part.
inline WaveFactorization exp_split_factorize(const GridFunction& f, Quadrant conv = Quadrant::closed) {
  const auto& g = f.grid();
  const double mx = f.max_abs();
  if (decay_diagnostic(f) > 1e-10) throw PreconditionError("exp-split input does not decay inside the window");
  GridFunction fp(g), fm(g);
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) {
      if (in_quadrant(a, b, conv)) {
        fp(a, b) = f(a, b);
      } else if (in_minus_quadrant(a, b, conv)) {
        fm(a, b) = f(a, b);
      } else if (std::abs(f(a, b)) > 1e-13 * mx) {
        std::ostringstream os;
        os << "exp-split input has mass " << std::abs(f(a, b)) << " at (" << a << ',' << b
           << ") outside K_d and -K_d";
        throw PreconditionError(os.str());
      }
    }
  auto sp = dft_forward(fp);
  auto sm = dft_forward(fm);
  double re_max = 0.0;
  for (auto v : sp.values()) re_max = std::max(re_max, v.real());
  for (auto v : sm.values()) re_max = std::max(re_max, v.real());
  if (re_max > 300.0) {
    std::ostringstream os;
    os << "exp-split overflow risk: max Re f~ = " << re_max << "; scale f down by at least " << re_max / 300.0;
    throw PreconditionError(os.str());
  }
  for (auto& v : sp.values()) v = std::exp(v);
  for (auto& v : sm.values()) v = std::exp(v);
  return make_factorization(PeriodicSymbol(std::move(sp), 0.0), PeriodicSymbol(std::move(sm), 0.0), 0.0);
}

/// (c - zeta1 - zeta2)^power; kernel supported on {0..power}^2 h in the closed quadrant.
inline PeriodicSymbol elementary_plus_factor(const LatticeGrid& g, double c, int power) {
  if (!(c > 0.0)) throw std::invalid_argument("plus factor needs c > 0");
  if (power < 0) throw std::invalid_argument("plus factor power must be nonnegative");
  return {SpectrumFunction::sample(g, [&](int a, int b) {
            return std::pow(c - zeta(g.h(), g.freq(a)) - zeta(g.h(), g.freq(b)), power);
          }),
          static_cast<double>(power)};
}

/// (c - eta1 - eta2)^power with eta_k = hbar(e^{+ih xi_k} - 1); support in -K.
inline PeriodicSymbol elementary_minus_factor(const LatticeGrid& g, double c, int power) {
  if (!(c > 0.0)) throw std::invalid_argument("minus factor needs c > 0");
  if (power < 0) throw std::invalid_argument("minus factor power must be nonnegative");
  return {SpectrumFunction::sample(g, [&](int a, int b) {
            return std::pow(c - eta(g.h(), g.freq(a)) - eta(g.h(), g.freq(b)), power);
          }),
          static_cast<double>(power)};
}

/// Pointwise product; orders add.
inline PeriodicSymbol compose_symbol(const std::vector<PeriodicSymbol>& parts) {
  if (parts.empty()) throw std::invalid_argument("compose_symbol needs at least one part");
  auto values = parts.front().values();
  double order = parts.front().declared_order();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    require_same_grid(parts[i].grid(), values.grid());
    values *= parts[i].values();
    order += parts[i].declared_order();
  }
  return {std::move(values), order};
}

/// Factor-wise product of factorizations; indices add.
inline WaveFactorization compose_factorizations(const std::vector<WaveFactorization>& parts) {
  std::vector<PeriodicSymbol> plus, minus;
  double index = 0.0;
  for (const auto& p : parts) {
    plus.push_back(p.plus);
    minus.push_back(p.minus);
    index += p.index;
  }
  return make_factorization(compose_symbol(plus), compose_symbol(minus), index);
}

struct OrderCertificate {
  double c1;
  double c2;
  double ratio() const { return c2 / c1; }
};

/// min and max of |A_d| W^{-alpha/2} over the frequency nodes.
inline OrderCertificate certify_order(const PeriodicSymbol& sym, WeightMode mode) {
  const auto& g = sym.grid();
  double lo = 1e300, hi = 0.0;
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) {
      const double w = sobolev_weight(g.h(), g.freq(a), g.freq(b), mode);
      const double r = std::abs(sym(a, b)) * std::pow(w, -sym.declared_order() / 2.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  return {lo, hi};
}

struct CertificateRow {
  double h;
  OrderCertificate cert;
};

/// Smallest power-of-two N with N h >= half_length.
inline int window_points(double h, double half_length) {
  int n = 2;
  while (n * h < half_length) n *= 2;
  return n;
}

/// Re-measure the certificate of a symbol family over several lattice steps
/// on a window of fixed physical half-length.
inline std::vector<CertificateRow> certify_order_sweep(const std::function<PeriodicSymbol(const LatticeGrid&)>& build,
                                                       const std::vector<double>& hs, double half_length,
                                                       WeightMode mode) {
  std::vector<CertificateRow> rows;
  for (double h : hs) rows.push_back({h, certify_order(build(LatticeGrid(h, window_points(h, half_length))), mode)});
  return rows;
}

/// max/min of c2/c1 across a sweep, minus one.
inline double certificate_drift(const std::vector<CertificateRow>& rows) {
  double lo = 1e300, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min(lo, r.cert.ratio());
    hi = std::max(hi, r.cert.ratio());
  }
  return hi / lo - 1.0;
}

/// Q_n = (c - zeta1 - zeta2)^n.
struct QnPolynomial {
  int n;
  double c;
  PeriodicSymbol symbol;
};

inline QnPolynomial make_qn(const LatticeGrid& g, int n, double c) { return {n, c, elementary_plus_factor(g, c, n)}; }

// --- catalog ---------------------------------------------------------------

/// Exp-split source data: Gaussian bumps of physical width 0.3 with seeded
/// centers in (0.3, 1.2)^2 and its reflection, amplitudes scaled by `scale`,
/// truncated to K_d and -K_d. Defined in physical units so that its transform
/// is consistent across lattice steps.
inline GridFunction exp_split_source(const LatticeGrid& g, unsigned seed, double scale, Quadrant conv = Quadrant::closed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.3, 1.2);
  std::normal_distribution<double> amp;
  struct Bump {
    double x1, x2;
    cplx a;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < 3; ++i) {
    const double x1 = pos(rng), x2 = pos(rng);
    const cplx a{amp(rng), amp(rng)};
    bumps.push_back({x1, x2, a});
    const double y1 = pos(rng), y2 = pos(rng);
    const cplx b{amp(rng), amp(rng)};
    bumps.push_back({-y1, -y2, b});
  }
  const double w = 0.3;
  return GridFunction::sample(g, [&](int m1, int m2) {
    const bool plus = in_quadrant(m1, m2, conv);
    const bool minus = in_minus_quadrant(m1, m2, conv) && !(m1 == 0 && m2 == 0 && plus);
    if (!plus && !minus) return cplx{};
    cplx v{};
    for (const auto& bp : bumps) {
      if ((bp.x1 > 0) != plus) continue;
      const double d1 = g.point(m1) - bp.x1, d2 = g.point(m2) - bp.x2;
      v += bp.a * std::exp(-(d1 * d1 + d2 * d2) / (2 * w * w));
    }
    return scale * v;
  });
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  const auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// Build a factorization from a catalog name:
///   identity | exp_split(seed,scale) | plus(c,m) | minus(c,m) | product(A;B;...)
inline WaveFactorization catalog_factorization(const std::string& spec, const LatticeGrid& g,
                                               Quadrant conv = Quadrant::closed) {
  const std::string s = detail::trim(spec);
  const auto open = s.find('(');
  const std::string name = detail::trim(s.substr(0, open));
  std::vector<std::string> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw std::invalid_argument("malformed catalog entry: " + s);
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    args = detail::split_top_level(inner, name == "product" ? ';' : ',');
  }
  auto need = [&](std::size_t n) {
    if (args.size() != n) throw std::invalid_argument("catalog entry " + name + " expects " + std::to_string(n) + " arguments");
  };
  if (name == "identity") return trivial_factorization(g);
  if (name == "exp_split") {
    need(2);
    return exp_split_factorize(exp_split_source(g, static_cast<unsigned>(std::stoul(args[0])), std::stod(args[1]), conv), conv);
  }
  if (name == "plus") {
    need(2);
    const int m = std::stoi(args[1]);
    return make_factorization(elementary_plus_factor(g, std::stod(args[0]), m), PeriodicSymbol::constant(g), m);
  }
  if (name == "minus") {
    need(2);
    return make_factorization(PeriodicSymbol::constant(g), elementary_minus_factor(g, std::stod(args[0]), std::stoi(args[1])), 0.0);
  }
  if (name == "product") {
    if (args.empty()) throw std::invalid_argument("product needs parts");
    std::vector<WaveFactorization> parts;
    for (const auto& a : args) parts.push_back(catalog_factorization(a, g, conv));
    return compose_factorizations(parts);
  }
  throw std::invalid_argument("unknown catalog symbol: " + name);
}

}  // namespace dpde
