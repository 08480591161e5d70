#pragma once

// Discrete Sobolev-Slobodetskii weights and norms.

#include <cmath>
#include <ostream>
#include <string>

#include "dpde/errors.hpp"
#include "dpde/lattice.hpp"

namespace dpde {

/// squared_sum: 1 + |zeta1^2 + zeta2^2|.
/// modulus_sum:   1 + |zeta1|^2 + |zeta2|^2, comparable to 1 + |xi|^2 uniformly in h.
enum class WeightMode { squared_sum, modulus_sum };

inline std::string to_string(WeightMode m) { return m == WeightMode::squared_sum ? "squared_sum" : "modulus_sum"; }

inline WeightMode weight_mode_from_string(const std::string& s) {
  if (s == "squared_sum") return WeightMode::squared_sum;
  if (s == "modulus_sum") return WeightMode::modulus_sum;
  throw std::invalid_argument("unknown weight mode: " + s);
}

inline double sobolev_weight(double h, double xi1, double xi2, WeightMode mode) {
  const cplx z1 = zeta(h, xi1);
  const cplx z2 = zeta(h, xi2);
  if (mode == WeightMode::squared_sum) return 1.0 + std::abs(z1 * z1 + z2 * z2);
  return 1.0 + std::norm(z1) + std::norm(z2);
}

/// One-variable weight; both modes coincide in one dimension.
inline double sobolev_weight_1d(double h, double xi) { return 1.0 + std::norm(zeta(h, xi)); }

struct SobolevParams {
  double s = 0.0;
  WeightMode mode = WeightMode::modulus_sum;
};

/// Weight samples on the frequency nodes of a grid.
class SobolevWeight {
 public:
  SobolevWeight(const LatticeGrid& g, WeightMode mode) : grid_(g), mode_(mode), values_(g) {
    for (int a = g.first(); a <= g.last(); ++a)
      for (int b = g.first(); b <= g.last(); ++b) values_(a, b) = sobolev_weight(g.h(), g.freq(a), g.freq(b), mode);
  }
  WeightMode mode() const { return mode_; }
  const LatticeGrid& grid() const { return grid_; }
  double operator()(int k1, int k2) const { return values_(k1, k2).real(); }

 private:
  LatticeGrid grid_;
  WeightMode mode_;
  SpectrumFunction values_;
};

/// (sum over nodes of W^s |s|^2 (dxi)^2)^(1/2): the norm evaluated on a spectrum.
inline double norm_hs(const SpectrumFunction& spec, const SobolevParams& p) {
  const auto& g = spec.grid();
  double acc = 0.0;
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b)
      acc += std::pow(sobolev_weight(g.h(), g.freq(a), g.freq(b), p.mode), p.s) * std::norm(spec(a, b));
  return std::sqrt(acc) * g.dxi();
}

inline double norm_hs(const GridFunction& u, const SobolevParams& p) { return norm_hs(dft_forward(u), p); }

/// Norm of the zero-extension of quadrant-supported v. This is an upper bound
/// for the infimum over all continuations, not the infimum itself.
inline double norm_hs_plus(const GridFunction& v, const SobolevParams& p, Quadrant q) {
  const double mx = v.max_abs();
  if (mx > 0.0 && exterior_max(v, q) > 1e-13 * mx)
    throw PreconditionError("plus-norm argument has support outside the quadrant");
  return norm_hs(restrict_quadrant(v, q), p);
}

inline double norm_1d(const LineSpectrum& spec, double s) {
  const auto& g = spec.grid();
  double acc = 0.0;
  for (int k = g.first(); k <= g.last(); ++k) acc += std::pow(sobolev_weight_1d(g.h(), g.freq(k)), s) * std::norm(spec(k));
  return std::sqrt(acc * g.dxi());
}

inline double norm_1d(const LineFunction& c, double s) { return norm_1d(dft_forward(c), s); }

inline void write_norm_header(std::ostream& os) { os << "name,s,weight_mode,value\n"; }

inline void write_norm_row(std::ostream& os, const std::string& name, const SobolevParams& p, double value) {
  os << name << ',' << p.s << ',' << to_string(p.mode) << ',' << value << '\n';
}

}  // namespace dpde
