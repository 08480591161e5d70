#include <gtest/gtest.h>

#include "dpde/lattice.hpp"
#include "test_support.hpp"

using namespace dpde;
using namespace dpde::testing;

TEST(LatticeGrid, RejectsBadParameters) {
  EXPECT_THROW(LatticeGrid(0.0, 4), std::invalid_argument);
  EXPECT_THROW(LatticeGrid(0.1, 1), std::invalid_argument);
  EXPECT_THROW(LatticeGrid(0.1, 6), std::invalid_argument);
  const LatticeGrid g(0.25, 8);
  EXPECT_DOUBLE_EQ(g.dxi(), pi * 4.0 / 8.0);
  EXPECT_EQ(g.wrap(8), -8);
  EXPECT_EQ(g.wrap(-9), 7);
}

TEST(Dft, ImpulseAtOriginHasUnitSpectrum) {
  const LatticeGrid g(0.3, 8);
  const auto s = dft_forward(unit_impulse(g));
  for (auto v : s.values()) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-14);
}

TEST(Dft, ShiftMultipliesByPhase) {
  const LatticeGrid g(0.5, 8);
  const auto u = random_grid(g, 3);
  const auto shifted = GridFunction::sample(g, [&](int a, int b) { return u(g.wrap(a - 1), b); });
  const auto s = dft_forward(u);
  const auto t = dft_forward(shifted);
  for (int k1 = g.first(); k1 <= g.last(); ++k1)
    for (int k2 = g.first(); k2 <= g.last(); ++k2)
      EXPECT_NEAR(std::abs(t(k1, k2) - std::exp(-I * g.h() * g.freq(k1)) * s(k1, k2)), 0.0, 1e-12);
}

TEST(Dft, InverseOfPhaseIsShiftedImpulse) {
  const LatticeGrid g(0.5, 4);
  const auto s = SpectrumFunction::sample(g, [&](int k1, int) { return std::exp(-I * g.h() * g.freq(k1)); });
  const auto u = dft_inverse(s);
  EXPECT_LT(max_diff(u, unit_impulse(g, 1, 0)), 1e-13);
  EXPECT_LT(max_diff(dft_inverse(SpectrumFunction::sample(g, [](int, int) { return cplx{1.0}; })), unit_impulse(g)),
            1e-13);
}

TEST(Dft, MatchesBruteForceSumsAtSmallWindow) {
  const LatticeGrid g(0.7, 4);
  const auto u = random_grid(g, 11);
  EXPECT_LT(rel_diff(dft_forward(u), brute_forward(u)), 1e-13);
  const auto s = random_spectrum(g, 12);
  EXPECT_LT(rel_diff(dft_inverse(s), brute_inverse(s)), 1e-13);
}

TEST(Dft, RoundTripAndParseval) {
  for (int n : {2, 4, 8, 16, 32}) {
    const LatticeGrid g(1.0 / n, n);
    const auto u = random_grid(g, 100 + n);
    const auto s = dft_forward(u);
    EXPECT_LT(rel_diff(dft_inverse(s), u), 1e-12);
    const auto t = random_spectrum(g, 200 + n);
    EXPECT_LT(rel_diff(dft_forward(dft_inverse(t)), t), 1e-12);
    double lhs = 0.0, rhs = 0.0;
    for (auto v : u.values()) lhs += std::norm(v) * g.h() * g.h();
    for (auto v : s.values()) rhs += std::norm(v) * g.dxi() * g.dxi();
    rhs /= 4.0 * pi * pi;
    EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
  }
}

TEST(Dft, OneDimensionalPair) {
  const LatticeGrid g(0.25, 8);
  LineFunction c(g);
  c(0) = 1.0 / g.h();
  const auto cs = dft_forward(c);
  for (auto v : cs.values()) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-14);
  const auto d = LineFunction::sample(g, [](int m) { return cplx{std::sin(m * 1.0), std::cos(m * 0.3)}; });
  EXPECT_LT(max_diff(dft_inverse(dft_forward(d)), d), 1e-13);
  // direct sum at one node
  const int k = 3;
  cplx direct{};
  for (int m = g.first(); m <= g.last(); ++m) direct += std::exp(-I * g.point(m) * g.freq(k)) * d(m) * g.h();
  EXPECT_NEAR(std::abs(dft_forward(d)(k) - direct), 0.0, 1e-13);
}

TEST(DividedDifference, ConstantGoesToZero) {
  const LatticeGrid g(0.1, 8);
  const auto u = GridFunction::sample(g, [](int, int) { return cplx{2.5, -1.0}; });
  for (int axis : {1, 2})
    for (int order : {1, 2}) EXPECT_LT(divided_difference(u, axis, order).max_abs(), 1e-12);
  EXPECT_LT(discrete_laplacian(u).max_abs(), 1e-12);
}

TEST(DividedDifference, LinearFunctionTelescopes) {
  const LatticeGrid g(0.125, 8);
  const auto u = GridFunction::sample(g, [&](int a, int) { return cplx{g.point(a)}; });
  const auto d = divided_difference(u, 1, 1);
  for (int a = g.first(); a < g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b) EXPECT_NEAR(d(a, b).real(), 1.0, 1e-12);
}

TEST(DividedDifference, SpectralMultipliers) {
  const LatticeGrid g(0.2, 16);
  const auto u = random_grid(g, 5);
  const auto s = dft_forward(u);
  const double h = g.h();
  for (int axis : {1, 2})
    for (int order : {1, 2}) {
      const auto expected = SpectrumFunction::sample(g, [&](int k1, int k2) {
        return std::pow(eta(h, g.freq(axis == 1 ? k1 : k2)), order) * s(k1, k2);
      });
      EXPECT_LT(rel_diff(dft_forward(divided_difference(u, axis, order)), expected), 1e-12);
    }
  // zeta_k is the multiplier of the lagging difference hbar(u(x - h e) - u(x)).
  const auto lag = GridFunction::sample(g, [&](int a, int b) { return (u(g.wrap(a - 1), b) - u(a, b)) / h; });
  const auto expected = SpectrumFunction::sample(g, [&](int k1, int k2) { return zeta(h, g.freq(k1)) * s(k1, k2); });
  EXPECT_LT(rel_diff(dft_forward(lag), expected), 1e-12);
}

TEST(DiscreteLaplacian, StencilAndMultiplier) {
  const LatticeGrid g(0.5, 8);
  const double h2 = 0.25;
  const auto lap = discrete_laplacian(unit_impulse(g));
  const double unit = 1.0 / h2 / h2;
  EXPECT_NEAR(lap(0, 0).real(), 2.0 * unit, 1e-9);
  EXPECT_NEAR(lap(-1, 0).real(), -2.0 * unit, 1e-9);
  EXPECT_NEAR(lap(-2, 0).real(), unit, 1e-9);
  EXPECT_NEAR(lap(0, -1).real(), -2.0 * unit, 1e-9);
  EXPECT_NEAR(lap(1, 0).real(), 0.0, 1e-9);

  const auto u = random_grid(g, 9);
  const auto s = dft_forward(u);
  const auto expected = SpectrumFunction::sample(g, [&](int k1, int k2) {
    const cplx z2 = std::pow(eta(g.h(), g.freq(k1)), 2) + std::pow(eta(g.h(), g.freq(k2)), 2);
    return z2 * s(k1, k2);
  });
  EXPECT_LT(rel_diff(dft_forward(discrete_laplacian(u)), expected), 1e-12);
}

TEST(RestrictQuadrant, IndicatorBehaviour) {
  const LatticeGrid g(0.5, 8);
  const auto inside = random_supported(g, 1, 2.0, [](int a, int b) { return a > 0 && b > 0; });
  const auto opposite = random_supported(g, 2, 2.0, [](int a, int b) { return a < 0 && b < 0; });
  for (auto q : {Quadrant::closed, Quadrant::open}) {
    EXPECT_EQ(max_diff(restrict_quadrant(inside, q), inside), 0.0);
    EXPECT_EQ(restrict_quadrant(opposite, q).max_abs(), 0.0);
    const auto u = random_grid(g, 3);
    const auto once = restrict_quadrant(u, q);
    EXPECT_EQ(max_diff(restrict_quadrant(once, q), once), 0.0);
  }
  const auto d = unit_impulse(g);
  EXPECT_EQ(restrict_quadrant(d, Quadrant::closed)(0, 0), d(0, 0));
  EXPECT_EQ(restrict_quadrant(d, Quadrant::open).max_abs(), 0.0);
}

TEST(DecayDiagnostic, FlagsEdgeMass) {
  const LatticeGrid g(0.5, 8);
  auto u = unit_impulse(g);
  EXPECT_EQ(decay_diagnostic(u), 0.0);
  u(g.last(), 0) = u(0, 0);
  EXPECT_DOUBLE_EQ(decay_diagnostic(u), 1.0);
}
