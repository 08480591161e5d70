#include <gtest/gtest.h>

#include "dpde/projector.hpp"
#include "dpde/sobolev.hpp"
#include "test_support.hpp"

using namespace dpde;
using namespace dpde::testing;

namespace {

GridFunction smooth_data(const LatticeGrid& g, unsigned seed, double width, bool vanish_on_axes) {
  return random_supported(g, seed, width, [&](int a, int b) { return !vanish_on_axes || (a != 0 && b != 0); });
}

}  // namespace

TEST(ProjectPlus, FixesQuadrantDataAndAnnihilatesOpposite) {
  const LatticeGrid g(0.25, 16);
  const auto inside = dft_forward(random_supported(g, 1, 3.0, [](int a, int b) { return a > 0 && b > 0; }));
  const auto opposite = dft_forward(random_supported(g, 2, 3.0, [](int a, int b) { return a < 0 && b < 0; }));
  for (auto q : {Quadrant::closed, Quadrant::open}) {
    const ProjectorConfig cfg{q, Realization::spatial, 0.0, 0};
    EXPECT_LT(relative_error(project_plus(inside, cfg), inside), 1e-12);
    EXPECT_LT(project_plus(opposite, cfg).max_abs(), 1e-12 * opposite.max_abs());
    EXPECT_LT(relative_error(project_minus(opposite, cfg), opposite), 1e-12);
    EXPECT_LT(project_minus(inside, cfg).max_abs(), 1e-12 * inside.max_abs());
  }
  const auto one = SpectrumFunction::sample(g, [](int, int) { return cplx{1.0}; });
  const auto closed = project_plus(one, {Quadrant::closed, Realization::spatial, 0.0, 0});
  const auto open = project_plus(one, {Quadrant::open, Realization::spatial, 0.0, 0});
  for (auto v : closed.values()) EXPECT_NEAR(std::abs(v - 1.0), 0.0, 1e-13);
  EXPECT_LT(open.max_abs(), 1e-13);
}

TEST(ProjectPlus, IdempotentAndComplementary) {
  for (int n : {8, 16, 32})
    for (auto q : {Quadrant::closed, Quadrant::open}) {
      const LatticeGrid g(1.0 / n, n);
      const auto s = random_spectrum(g, n);
      const ProjectorConfig cfg{q, Realization::spatial, 0.0, 0};
      const auto p = project_plus(s, cfg);
      EXPECT_LT(relative_error(project_plus(p, cfg), p), 1e-12);
      EXPECT_LT(relative_error(p + project_minus(s, cfg), s), 1e-14);
    }
}

TEST(DirectSum, UniqueUnderOpenConventionAndOnAxisVanishingData) {
  const LatticeGrid g(0.5, 8);
  EXPECT_EQ(direct_sum_overlap(g, Quadrant::open), 0);
  EXPECT_EQ(direct_sum_overlap(g, Quadrant::closed), 2 * g.half() - 1);
  // Under the closed convention every overlap point lies on an axis, so
  // axis-vanishing data has a unique split.
  for (int a = g.first(); a <= g.last(); ++a)
    for (int b = g.first(); b <= g.last(); ++b)
      if (in_quadrant(a, b, Quadrant::closed) && !in_quadrant(a, b, Quadrant::open)) {
        EXPECT_TRUE(a == 0 || b == 0);
      }
}

TEST(CotangentLineSum, ClosedFormMatchesSeries) {
  const LatticeGrid g(0.25, 8);
  const double h = g.h();
  auto series = [&](cplx z) {
    cplx acc{};
    for (int m = 0; m < 10000; ++m) acc += std::exp(-I * (m * h) * z) * h;
    return acc;
  };
  for (cplx z : {cplx{0.0, -g.hbar()}, cplx{pi * g.hbar(), -0.1 * g.hbar()}, cplx{1.3, -0.8 * g.hbar()},
                 cplx{-2.0, -5.0 * g.hbar()}}) {
    EXPECT_NEAR(std::abs(cotangent_line_sum(z, g) - series(z)), 0.0, 1e-10);
  }
  EXPECT_NEAR(std::abs(cotangent_line_sum(cplx{0.0, -g.hbar()}, g) - h / (1.0 - std::exp(-1.0))), 0.0, 1e-14);
  EXPECT_THROW(cotangent_line_sum(cplx{1.0, 0.0}, g), std::domain_error);
  EXPECT_THROW(cotangent_line_sum(cplx{1.0, 0.2}, g), std::domain_error);
}

TEST(CotangentLineSum, CotangentIdentityAtRandomPoints) {
  const LatticeGrid g(0.125, 8);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> re(-pi * g.hbar(), pi * g.hbar()), im(-3.0 * g.hbar(), -0.01);
  for (int i = 0; i < 100; ++i) {
    const cplx z{re(rng), im(rng)};
    const cplx cot_form = g.h() / 2.0 - I * g.h() / 2.0 * (std::cos(g.h() * z / 2.0) / std::sin(g.h() * z / 2.0));
    EXPECT_LT(std::abs(cot_form - cotangent_line_sum(z, g)), 1e-13 * std::abs(cot_form) + 1e-15);
  }
}

TEST(KernelQuadrature, RequiresPositiveEpsilonAndWarnsWhenTiny) {
  const LatticeGrid g(0.25, 8);
  const auto s = random_spectrum(g, 1);
  EXPECT_THROW(project_plus(s, {Quadrant::closed, Realization::kernel_quadrature, 0.0, 0}), PreconditionError);
  EXPECT_FALSE(conditioning_warning({Quadrant::closed, Realization::kernel_quadrature, 0.1 * g.hbar(), 0}, g));
  EXPECT_TRUE(conditioning_warning({Quadrant::closed, Realization::kernel_quadrature, 1e-5 * g.dxi(), 0}, g));
}

TEST(KernelQuadrature, ConvergesToSpatialRealization) {
  const LatticeGrid g(0.25, 32);
  for (auto q : {Quadrant::closed, Quadrant::open}) {
    const auto s = dft_forward(smooth_data(g, 5, 0.75, q == Quadrant::open));
    const auto exact = project_plus(s, {q, Realization::spatial, 0.0, 0});
    double prev = 1e300;
    for (double c : {1e-1, 1e-2, 1e-3}) {
      const ProjectorConfig cfg{q, Realization::kernel_quadrature, c * g.hbar(), 0};
      const double err = relative_error(project_plus(s, cfg), exact);
      EXPECT_LT(err, prev);
      prev = err;
    }
    // Axis-free data starts at m1 + m2 = 2, so the open-convention error at
    // eps = 1e-3 hbar is at least 1 - e^{-2e-3}.
    EXPECT_LE(prev, q == Quadrant::closed ? 1e-3 : 2.5e-3);
    const ProjectorConfig last{q, Realization::kernel_quadrature, 1e-3 * g.hbar(), 0};
    EXPECT_LE(relative_error(project_plus_extrapolated(s, last), exact), 1e-5);
  }
}

TEST(KernelQuadrature, OpenConventionTermsVanishOnAxisFreeData) {
  const LatticeGrid g(0.25, 16);
  const auto s = dft_forward(smooth_data(g, 6, 1.0, true));
  const ProjectorConfig closed{Quadrant::closed, Realization::kernel_quadrature, 0.05 * g.hbar(), 0};
  const auto terms = kernel_terms(s, closed);
  for (int t = 0; t < 3; ++t) EXPECT_LT(terms[t].max_abs(), 1e-12 * s.max_abs());
  ProjectorConfig open = closed;
  open.conv = Quadrant::open;
  EXPECT_LT(relative_error(project_plus(s, open), project_plus(s, closed)), 1e-12);
}

TEST(ProjectPlus, BoundedInHsForSmallS) {
  for (double s : {-0.4, 0.0, 0.4}) {
    double worst = 0.0;
    for (int e = 3; e <= 6; ++e) {
      const LatticeGrid g(std::ldexp(1.0, -e), 16);
      for (unsigned seed = 0; seed < 5; ++seed) {
        const auto spec = random_spectrum(g, seed + 10 * e);
        const SobolevParams p{s, WeightMode::modulus_sum};
        worst = std::max(worst, norm_hs(project_plus(spec), p) / norm_hs(spec, p));
      }
    }
    EXPECT_LT(worst, 3.0) << "s = " << s;
  }
}
