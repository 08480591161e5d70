#include <gtest/gtest.h>

#include "dpde/samples.hpp"
#include "dpde/solvers.hpp"
#include "test_support.hpp"

using namespace dpde;
using dpde::testing::max_diff;
using dpde::testing::random_grid;

namespace {

const LatticeGrid kGrid(0.25, 32);

WaveFactorization index_zero() { return catalog_factorization("exp_split(11,0.1)", kGrid); }
WaveFactorization index_one() { return catalog_factorization("product(exp_split(11,0.1); plus(8,1))", kGrid); }
WaveFactorization index_two() { return catalog_factorization("product(exp_split(11,0.1); plus(8,2))", kGrid); }

double rel(const GridFunction& a, const GridFunction& b) { return max_diff(a, b) / b.max_abs(); }

LineSpectrum layer(unsigned seed) { return dft_forward(half_line_bumps(kGrid, seed)); }

}  // namespace

TEST(Operator, IdentityAndLaplacian) {
  const auto u = random_grid(kGrid, 1);
  const DigitalOperator id{PeriodicSymbol::constant(kGrid)};
  EXPECT_LE(max_diff(apply_operator(id, u), u), 1e-13 * u.max_abs());
  const auto lap = SpectrumFunction::sample(kGrid, [&](int a, int b) {
    return std::conj(std::pow(zeta(kGrid.h(), kGrid.freq(a)), 2) + std::pow(zeta(kGrid.h(), kGrid.freq(b)), 2));
  });
  const auto want = discrete_laplacian(u);
  EXPECT_LE(max_diff(apply_operator({PeriodicSymbol(lap, 2.0)}, u), want), 1e-12 * want.max_abs());
}

TEST(Unique, TrivialFactorizationReturnsData) {
  const auto v = quadrant_bumps(kGrid, 2);
  const auto r = solve_unique(trivial_factorization(kGrid), 0.0, v);
  EXPECT_LE(max_diff(r.u, v), 1e-13 * v.max_abs());
}

TEST(Unique, ManufacturedSolution) {
  for (const auto& [fact, s] : {std::pair{index_zero(), 0.0}, std::pair{index_one(), 1.0}}) {
    const auto ustar = quadrant_bumps(kGrid, 3);
    const auto v = restrict_quadrant(apply_operator(make_operator(fact), ustar), Quadrant::closed);
    const auto r = solve_unique(fact, s, v);
    EXPECT_LE(rel(r.u, ustar), 1e-8);
    EXPECT_LE(r.report.residual, 1e-8);
    EXPECT_LE(r.report.exterior_mass, 1e-8);
  }
}

TEST(Unique, ContinuationIndependence) {
  const auto fact = index_one();
  const auto v = quadrant_bumps(kGrid, 4);
  const auto tail = GridFunction::sample(kGrid, [&](int a, int b) {
    if (in_quadrant(a, b, Quadrant::closed)) return cplx{};
    const double x1 = kGrid.point(a) + 1.0, x2 = kGrid.point(b) - 1.0;
    return cplx{0.7, -0.3} * std::exp(-(x1 * x1 + x2 * x2) / 0.5);
  });
  const auto u0 = solve_unique(fact, 1.0, v).u;
  const auto u1 = solve_unique(fact, 1.0, v, Quadrant::closed, {tail}).u;
  EXPECT_LE(max_diff(restrict_quadrant(u0, Quadrant::closed), restrict_quadrant(u1, Quadrant::closed)), 1e-8 * u0.max_abs());
  EXPECT_THROW(solve_unique(fact, 1.0, v, Quadrant::closed, {v}), PreconditionError);
}

TEST(Unique, Preconditions) {
  const auto v = quadrant_bumps(kGrid, 5);
  EXPECT_THROW(solve_unique(index_zero(), 0.5, v), PreconditionError);
  EXPECT_THROW(solve_unique(index_one(), 0.0, v), PreconditionError);
  auto bad = v;
  bad(-2, 3) = 1.0;
  EXPECT_THROW(solve_unique(index_zero(), 0.0, bad), PreconditionError);
}

TEST(Unique, Linearity) {
  const auto fact = index_one();
  const auto x = quadrant_bumps(kGrid, 6), y = quadrant_bumps(kGrid, 7);
  const cplx a{0.3, 1.1}, b{-2.0, 0.4};
  auto comb = a * x;
  comb += b * y;
  auto want = a * solve_unique(fact, 1.0, x).u;
  want += b * solve_unique(fact, 1.0, y).u;
  EXPECT_LE(max_diff(solve_unique(fact, 1.0, comb).u, want), 1e-11 * want.max_abs());
}

TEST(General, ZeroDataGivesZero) {
  const auto r = general_solution(index_one(), 0.0, GridFunction(kGrid), zero_layers(kGrid, 1, 8.0));
  EXPECT_EQ(r.u.max_abs(), 0.0);
}

TEST(General, NonUniquenessWitnessed) {
  for (int n : {1, 2}) {
    const auto fact = n == 1 ? index_one() : index_two();
    const double s = n == 1 ? 0.0 : 0.0;
    std::vector<GridFunction> sols;
    for (unsigned trial = 0; trial < 3; ++trial) {
      auto spec = zero_layers(kGrid, n, 8.0);
      for (int k = 0; k < n; ++k) {
        spec.c[k] = layer(100 + 10 * trial + k);
        spec.d[k] = layer(200 + 10 * trial + k);
      }
      const auto r = general_solution(fact, s, quadrant_bumps(kGrid, 8), spec);
      EXPECT_LE(r.report.residual, 1e-8) << n << ' ' << trial;
      EXPECT_LE(r.report.exterior_mass, 1e-8) << n << ' ' << trial;
      sols.push_back(r.u);
    }
    EXPECT_GT(max_diff(sols[0], sols[1]), 1e-3);
    EXPECT_GT(max_diff(sols[1], sols[2]), 1e-3);
  }
}

TEST(General, RequiresMatchingWindow) {
  EXPECT_THROW(general_solution(index_one(), 0.0, GridFunction(kGrid), zero_layers(kGrid, 2, 8.0)), PreconditionError);
  auto spec = zero_layers(kGrid, 1, 8.0);
  spec.c.pop_back();
  EXPECT_THROW(general_solution(index_one(), 0.0, GridFunction(kGrid), spec), PreconditionError);
}

TEST(General, NUnchangedRhsOnlyMatchesUnique) {
  // with zero layers and n = 1 the residual still vanishes on the open quadrant
  const auto v = quadrant_bumps(kGrid, 9);
  const auto r = general_solution(index_one(), 0.0, v, zero_layers(kGrid, 1, 8.0));
  EXPECT_LE(r.report.residual, 1e-8);
}

TEST(Nonlocal, ZeroData) {
  const auto r = solve_nonlocal(index_one(), 0.0, {LineFunction(kGrid), LineFunction(kGrid)});
  EXPECT_EQ(r.u.max_abs(), 0.0);
}

TEST(Nonlocal, IdentityLikeFactor) {
  const auto fact = make_factorization(PeriodicSymbol::constant(kGrid), PeriodicSymbol::constant(kGrid), 1.0);
  const BoundaryData bd{zero_mean_profile(kGrid, 1.0), zero_mean_profile(kGrid, 1.2)};
  const auto r = solve_nonlocal(fact, 0.0, bd);
  const auto ft = dft_forward(bd.f), gt = dft_forward(bd.g);
  const auto want = SpectrumFunction::sample(kGrid, [&](int a, int b) { return gt(a) + ft(b); });
  EXPECT_LE(max_diff(dft_forward(r.u), want), 1e-12 * want.max_abs());
}

TEST(Nonlocal, PostChecksAndCrossConsistency) {
  const auto fact = index_one();
  const BoundaryData bd{zero_mean_profile(kGrid, 1.0), zero_mean_profile(kGrid, 1.2)};
  const auto r = solve_nonlocal(fact, 0.0, bd);
  EXPECT_LE(r.transformed_err, 1e-12);
  EXPECT_LE(r.spatial_err, 1e-8);
  EXPECT_LE(r.report.residual, 1e-8);
  EXPECT_LE(r.report.exterior_mass, 1e-8);

  auto spec = zero_layers(kGrid, 1, 8.0);
  const auto ft = dft_forward(bd.f), gt = dft_forward(bd.g);
  for (int k = kGrid.first(); k <= kGrid.last(); ++k) {
    spec.c[0](k) = fact.plus(k, 0) * gt(k);
    spec.d[0](k) = fact.plus(0, k) * ft(k);
  }
  const auto gs = general_solution(fact, 0.0, GridFunction(kGrid), spec);
  EXPECT_LE(max_diff(gs.u, r.u), 1e-10 * r.u.max_abs());
}

TEST(Nonlocal, Preconditions) {
  const auto fact = index_one();
  EXPECT_THROW(solve_nonlocal(fact, 0.0, {half_line_bumps(kGrid, 1), zero_mean_profile(kGrid, 1.0)}), PreconditionError);
  EXPECT_THROW(solve_nonlocal(fact, 0.0, {line_gaussian(kGrid, 0.0, 0.5), zero_mean_profile(kGrid, 1.0)}), PreconditionError);
  EXPECT_THROW(solve_nonlocal(fact, 0.8, {zero_mean_profile(kGrid, 1.0), zero_mean_profile(kGrid, 1.0)}), PreconditionError);
}

TEST(Nonlocal, Linearity) {
  const auto fact = index_one();
  const BoundaryData x{zero_mean_profile(kGrid, 1.0), zero_mean_profile(kGrid, 1.2)};
  const BoundaryData y{zero_mean_profile(kGrid, 0.8), zero_mean_profile(kGrid, 1.2)};
  const cplx a{0.5, -1.0};
  BoundaryData comb{a * x.f, a * x.g};
  comb.f += y.f;
  comb.g += y.g;
  auto want = a * solve_nonlocal(fact, 0.0, x).u;
  want += solve_nonlocal(fact, 0.0, y).u;
  EXPECT_LE(max_diff(solve_nonlocal(fact, 0.0, comb).u, want), 1e-11 * want.max_abs());
}

TEST(Dirichlet, IdentityAssembly) {
  const LatticeGrid g(0.25, 8);
  const auto fact = trivial_factorization(g);
  const BoundaryData bd{LineFunction(g), LineFunction(g)};
  const auto sys = dirichlet_assemble(fact, -1.0, bd);
  for (auto v : sys.a0.values()) EXPECT_NEAR(std::abs(v - 2.0 * pi * g.hbar()), 0.0, 1e-12);
  for (auto v : sys.b0.values()) EXPECT_NEAR(std::abs(v - 2.0 * pi * g.hbar()), 0.0, 1e-12);
  EXPECT_NEAR((sys.M1.array() - 1.0 / (2.0 * pi * g.hbar())).abs().maxCoeff(), 0.0, 1e-14);
  EXPECT_NEAR((sys.M2.array() - 1.0 / (2.0 * pi * g.hbar())).abs().maxCoeff(), 0.0, 1e-14);
  const auto r = dirichlet_solve(sys, bd);
  EXPECT_EQ(r.u.max_abs(), 0.0);
}

TEST(Dirichlet, IdentityConstantData) {
  // f~ = g~ = 1: the reduced equations give c0 = h, d0 = 0 under the gauge.
  const LatticeGrid g(0.25, 8);
  const auto fact = trivial_factorization(g);
  const auto delta = LineFunction::sample(g, [&](int m) { return m == 0 ? cplx{1.0 / g.h()} : cplx{}; });
  const BoundaryData bd{delta, delta};
  const auto r = dirichlet_solve(dirichlet_assemble(fact, -1.0, bd), bd);
  for (auto v : r.c0.values()) EXPECT_NEAR(std::abs(v - g.h()), 0.0, 1e-12);
  for (auto v : r.d0.values()) EXPECT_NEAR(std::abs(v), 0.0, 1e-12);
  EXPECT_LE(r.trace_err, 1e-12);
}

TEST(Dirichlet, CatalogSymbolTraces) {
  const LatticeGrid g(0.25, 16);
  const auto fact = catalog_factorization("product(exp_split(11,0.1); plus(8,1))", g);
  BoundaryData bd{line_gaussian(g, 0.5, 0.6, {1.0, 0.2}), line_gaussian(g, 0.8, 0.5, {0.3, -0.4})};
  bd.g(0) = bd.f(0);
  const auto r = dirichlet_solve(dirichlet_assemble(fact, 0.0, bd), bd);
  EXPECT_LE(r.system_residual, 1e-10);
  EXPECT_LE(r.trace_err, 1e-6);
  EXPECT_LE(std::abs(r.multiplier), 1e-10);
  EXPECT_LT(r.cond, 1e12);
}

TEST(Dirichlet, Preconditions) {
  const LatticeGrid g(0.25, 8);
  BoundaryData bd{line_gaussian(g, 0.5, 0.6), line_gaussian(g, 0.8, 0.5)};
  EXPECT_THROW(dirichlet_assemble(trivial_factorization(g), -1.0, bd), PreconditionError);
  bd.g(0) = bd.f(0);
  EXPECT_THROW(dirichlet_assemble(trivial_factorization(g), 0.0, bd), PreconditionError);
}

TEST(Dirichlet, SingularHypothesisDetected) {
  // A = e^{ih xi1}(c - zeta2): the xi1-sum of A^-1 vanishes identically.
  const LatticeGrid g(0.25, 8);
  const auto plus = PeriodicSymbol(SpectrumFunction::sample(g, [&](int a, int b) {
                                     return std::exp(I * g.h() * g.freq(a)) * (2.0 - zeta(g.h(), g.freq(b)));
                                   }),
                                   1.0);
  const auto fact = make_factorization(plus, PeriodicSymbol::constant(g), 1.0);
  const BoundaryData bd{line_gaussian(g, 0.5, 0.6), line_gaussian(g, 0.5, 0.6)};
  EXPECT_THROW(dirichlet_assemble(fact, 0.0, bd), NumericalError);
}
