#pragma once

// Seeded sample data in physical units, so that samples on different lattice
// steps discretize the same continuous function.

#include <cmath>
#include <random>
#include <vector>

#include "dpde/lattice.hpp"

namespace dpde {

/// Sum of three Gaussian bumps of width 0.4 centered in (0.6, 2)^2, restricted
/// to the quadrant.
inline GridFunction quadrant_bumps(const LatticeGrid& g, unsigned seed, Quadrant q = Quadrant::closed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.6, 2.0);
  std::normal_distribution<double> amp;
  struct Bump {
    double x1, x2;
    cplx a;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < 3; ++i) {
    const double x1 = pos(rng), x2 = pos(rng);
    bumps.push_back({x1, x2, cplx{amp(rng), amp(rng)}});
  }
  const double w = 0.4;
  return GridFunction::sample(g, [&](int m1, int m2) {
    if (!in_quadrant(m1, m2, q)) return cplx{};
    cplx v{};
    for (const auto& b : bumps) {
      const double d1 = g.point(m1) - b.x1, d2 = g.point(m2) - b.x2;
      v += b.a * std::exp(-(d1 * d1 + d2 * d2) / (2 * w * w));
    }
    return v;
  });
}

/// Sum of three Gaussian bumps of width 0.4 centered in (0.6, 2), zero for x < 0.
inline LineFunction half_line_bumps(const LatticeGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.6, 2.0);
  std::normal_distribution<double> amp;
  std::vector<std::pair<double, cplx>> bumps;
  for (int i = 0; i < 3; ++i) {
    const double x = pos(rng);
    bumps.emplace_back(x, cplx{amp(rng), amp(rng)});
  }
  const double w = 0.4;
  return LineFunction::sample(g, [&](int m) {
    if (m < 0) return cplx{};
    cplx v{};
    for (const auto& [x0, a] : bumps) v += a * std::exp(-std::pow(g.point(m) - x0, 2) / (2 * w * w));
    return v;
  });
}

/// Gaussian of width `width` centered at `x0` on the whole line.
inline LineFunction line_gaussian(const LatticeGrid& g, double x0, double width, cplx amp = 1.0) {
  return LineFunction::sample(g, [&](int m) { return amp * std::exp(-std::pow(g.point(m) - x0, 2) / (2 * width * width)); });
}

/// phi - lambda psi with phi = (x/a)^2 e^{-(x/a)^2}, psi = (x/a)^3 e^{-(x/a)^2} on x >= 0;
/// lambda makes the lattice sum vanish, so the transform is zero at xi = 0.
inline LineFunction zero_mean_profile(const LatticeGrid& g, double a) {
  auto phi = [&](int m) {
    const double t = g.point(m) / a;
    return m < 0 ? 0.0 : t * t * std::exp(-t * t);
  };
  auto psi = [&](int m) {
    const double t = g.point(m) / a;
    return m < 0 ? 0.0 : t * t * t * std::exp(-t * t);
  };
  double sp = 0.0, ss = 0.0;
  for (int m = g.first(); m <= g.last(); ++m) {
    sp += phi(m);
    ss += psi(m);
  }
  const double lambda = sp / ss;
  return LineFunction::sample(g, [&](int m) { return cplx{phi(m) - lambda * psi(m)}; });
}

/// Seeded complex normal values on the points where `keep` holds, times a
/// Gaussian envelope of `width` lattice steps around the origin.
template <class Pred>
GridFunction random_supported(const LatticeGrid& g, unsigned seed, double width, Pred keep) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  return GridFunction::sample(g, [&](int a, int b) {
    const cplx v{d(rng), d(rng)};
    if (!keep(a, b)) return cplx{};
    return v * std::exp(-(a * a + b * b) / (2.0 * width * width));
  });
}

/// Random data on K_d and -K_d (closed), envelope width 2 steps, times `scale`.
inline GridFunction two_quadrant_random(const LatticeGrid& g, unsigned seed, double scale) {
  auto f = random_supported(g, seed, 2.0, [](int a, int b) {
    return in_quadrant(a, b, Quadrant::closed) || in_minus_quadrant(a, b, Quadrant::closed);
  });
  f *= scale;
  return f;
}

/// Random data concentrated at the origin; optionally zero on both axes.
inline GridFunction corner_random(const LatticeGrid& g, unsigned seed, double width, bool vanish_on_axes) {
  return random_supported(g, seed, width, [&](int a, int b) { return !vanish_on_axes || (a != 0 && b != 0); });
}

}  // namespace dpde
