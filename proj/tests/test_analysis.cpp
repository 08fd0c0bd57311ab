#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gup/analysis.hpp"

using namespace gup;

namespace {

const PhysicalScales kUnit{1.0, 1.0};
const AnsatzModel kTanh(AnsatzKind::TanhCap, kUnit);
const AnsatzModel kArctan(AnsatzKind::ArctanCap, kUnit);
const AnsatzModel kIdentity(AnsatzKind::Identity, kUnit);

// pi / (2 sqrt 2), 20 digits
constexpr double kArctanBoundMin = 1.1107207345395915618;

}  // namespace

TEST(Uncertainty, CanonicalGaussianSaturates1D) {
  for (double s : {0.1, 0.5, 2.0}) {
    const auto psi = normalize(GaussianMixture(GaussianState({0.3, 0, 0}, {s, 1, 1}, 1)), Measure::flat());
    const auto r = uncertainty_report(kIdentity, psi, Measure::flat(), 0, 0);
    EXPECT_NEAR(r.delta_p, s, 1e-12 * s);
    EXPECT_NEAR(r.delta_x * r.delta_p, 0.5, 1e-10);
    EXPECT_NEAR(r.robertson_slack, 0.0, 1e-10);
    EXPECT_NEAR(r.commutator_expectation, 1.0, 1e-12);
  }
}

TEST(Uncertainty, RequiresNormalizedGrid) {
  const GaussianState g({0, 0, 0}, {0.5, 1, 1}, 1);
  const GridState raw = sample_to_grid(g, default_grid_axes(g, 64));
  EXPECT_THROW(operator_statistics(kTanh, raw, Measure::flat()), std::invalid_argument);
}

TEST(Uncertainty, GridAgreesWithClosedForm1D) {
  const auto m = Measure::weighted(kTanh);
  const GaussianState g({0.2, 0, 0}, {0.6, 1, 1}, 1);
  const GridState psi = normalize(sample_to_grid(g, default_grid_axes(g, 512)), m);
  const auto a = uncertainty_report(kTanh, psi, m, 0, 0);
  const auto b = uncertainty_report(kTanh, normalize(GaussianMixture(g), m), m, 0, 0);
  EXPECT_NEAR(a.delta_x, b.delta_x, 1e-6 * b.delta_x);
  EXPECT_NEAR(a.delta_p, b.delta_p, 1e-10 * b.delta_p);
}

TEST(Uncertainty, CappedMomentumSpreadBelowCanonicalAndCap) {
  for (const auto* model : {&kTanh, &kArctan}) {
    const auto m = Measure::weighted(*model);
    for (double s : {0.2, 1.0, 5.0}) {
      const auto psi = normalize(GaussianMixture(GaussianState({0.5, -0.5, 0}, {s, s, s})), m);
      const auto r = uncertainty_report(*model, psi, m, 1, 1);
      EXPECT_LE(r.delta_p, r.canonical_delta_p * (1 + 1e-12));
      EXPECT_LE(r.delta_p, model->p_max());
      EXPECT_GE(r.robertson_slack, -1e-10);
    }
  }
}

TEST(Uncertainty, AxisRelabelInvariance) {
  const auto m = Measure::weighted(kArctan);
  const GaussianState a({0.3, -0.2, 0.1}, {0.4, 0.6, 0.8});
  const GaussianState b({0.1, 0.3, -0.2}, {0.8, 0.4, 0.6});  // axes cycled 0->1->2->0
  const auto sa = operator_statistics(kArctan, normalize(GaussianMixture(a), m), m);
  const auto sb = operator_statistics(kArctan, normalize(GaussianMixture(b), m), m);
  for (int i = 0; i < 3; ++i) {
    const int k = (i + 1) % 3;
    const auto ra = uncertainty_report(sa, i, i), rb = uncertainty_report(sb, k, k);
    EXPECT_NEAR(ra.delta_x, rb.delta_x, 1e-9 * ra.delta_x);
    EXPECT_NEAR(ra.delta_p, rb.delta_p, 1e-9 * ra.delta_p);
  }
}

TEST(Uncertainty, AxisOutOfRange) {
  const auto s = operator_statistics(kTanh, GaussianMixture(GaussianState({0, 0, 0}, {0.5, 1, 1}, 1)),
                                     Measure::flat());
  EXPECT_THROW(uncertainty_report(s, 1, 0), std::out_of_range);
}

TEST(Bound, ArctanClosedForm) {
  const auto r = minimize_bound(BoundFunction::arctan_bound(kUnit));
  EXPECT_TRUE(r.interior);
  EXPECT_NEAR(r.min, kArctanBoundMin, 1e-14);
  EXPECT_NEAR(r.argmin, std::sqrt(8.0) / std::numbers::pi, 1e-12);
  EXPECT_THROW(BoundFunction::for_model(kIdentity), std::invalid_argument);
}

TEST(Bound, RandomCoefficientsOverSixDecades) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> e(-3.0, 3.0), hb(0.1, 10.0);
  for (int n = 0; n < 100; ++n) {
    const BoundFunction f{std::pow(10.0, e(rng)), hb(rng)};
    const auto r = minimize_bound(f);
    ASSERT_TRUE(r.interior);
    EXPECT_NEAR(r.argmin, f.analytic_argmin(), 1e-9 * f.analytic_argmin());
    EXPECT_NEAR(r.min, f.analytic_min(), 1e-12 * f.analytic_min());
  }
  EXPECT_THROW(minimize_bound(BoundFunction{0.0, 1.0}), std::invalid_argument);
}

TEST(Scan, FindsKnownMinimum) {
  const auto r = log_scan("x", {0.01, 100.0, 40}, [](double x) {
    const double u = std::log(x / 2.0);
    return 1.0 + u * u;
  });
  EXPECT_TRUE(r.interior);
  EXPECT_EQ(r.status(), "interior minimum");
  EXPECT_NEAR(r.argmin, 2.0, 1e-5);
  EXPECT_EQ(r.samples.size(), 40u);
  EXPECT_DOUBLE_EQ(r.samples.front().first, 0.01);
  EXPECT_DOUBLE_EQ(r.samples.back().first, 100.0);
}

TEST(Scan, ReportsEndpoint) {
  const auto r = log_scan("x", {0.1, 10.0, 10}, [](double x) { return 1.0 / x; });
  EXPECT_FALSE(r.interior);
  EXPECT_EQ(r.status(), "no interior minimum");
  EXPECT_DOUBLE_EQ(r.argmin, 10.0);
  EXPECT_THROW(log_scan("x", {1.0, 0.5, 10}, [](double x) { return x; }), std::invalid_argument);
}

TEST(Experiments, IdentitySphericalHasNoInteriorMinimum) {
  const auto r = spherical_experiment(kIdentity, {0.5, 4.0, 6}, Measure::flat());
  EXPECT_FALSE(r.scan.interior);
  EXPECT_NEAR(r.at_min.delta_x, 0.5 / 4.0, 1e-10);
  EXPECT_TRUE(std::isnan(r.bound_min));
}

TEST(Experiments, SphericalRowsAreIsotropic) {
  const auto r = spherical_experiment(kTanh, {0.2, 0.8, 5}, Measure::weighted(kTanh));
  EXPECT_EQ(r.rows.size(), 5u);
  EXPECT_NEAR(r.delta_x2_at_min, r.at_min.delta_x, 1e-9 * r.at_min.delta_x);
  EXPECT_NEAR(r.delta_x3_at_min, r.at_min.delta_x, 1e-9 * r.at_min.delta_x);
  for (const auto& row : r.rows) EXPECT_NEAR(row.p_perp_squared, 2.0 * row.canonical_delta_p * row.canonical_delta_p, 1e-9);
}

TEST(Experiments, BoostAtRestGivesUnitRatio) {
  const auto r = boosted_experiment(kTanh, 0.0, {0.2, 0.8, 5}, Measure::weighted(kTanh));
  EXPECT_NEAR(r.ratio, 1.0, 1e-9);
  EXPECT_NEAR(r.estimate_substituted, 0.5, 1e-15);
  EXPECT_THROW(boosted_experiment(kTanh, -1.0, {0.2, 0.8, 5}, Measure::flat()), std::invalid_argument);
}

TEST(RandomStates, RangesAndPurity) {
  const PhysicalScales scales{1.0, 2.0};
  for (std::size_t k = 0; k < 64; ++k) {
    const auto psi = random_state(scales, 7, k);
    const auto& comps = psi.components();
    if (k % 8 == 0) {
      EXPECT_EQ(comps.size(), 1u);
    } else {
      EXPECT_GE(comps.size(), 2u);
      EXPECT_LE(comps.size(), 4u);
    }
    for (const auto& c : comps) {
      for (int a = 0; a < 3; ++a) {
        EXPECT_LE(std::abs(c.center()[a]), 4.0);
        EXPECT_GE(c.widths()[a], 0.2 * (1 - 1e-12));
        EXPECT_LE(c.widths()[a], 4.0 * (1 + 1e-12));
      }
      EXPECT_GE(std::abs(c.amplitude()), 0.2 - 1e-12);
      EXPECT_LE(std::abs(c.amplitude()), 1.0 + 1e-12);
    }
  }
}

TEST(RandomStates, Deterministic) {
  const auto a = random_state(kUnit, 99, 5), b = random_state(kUnit, 99, 5), c = random_state(kUnit, 100, 5);
  ASSERT_EQ(a.components().size(), b.components().size());
  for (std::size_t n = 0; n < a.components().size(); ++n) {
    EXPECT_EQ(a.components()[n].center(), b.components()[n].center());
    EXPECT_EQ(a.components()[n].amplitude(), b.components()[n].amplitude());
  }
  EXPECT_NE(a.components()[0].center(), c.components()[0].center());
}

TEST(Robertson, SmallSuiteHolds) {
  for (const auto* model : {&kTanh, &kArctan, &kIdentity}) {
    const auto m = Measure::weighted(*model);
    const auto s = robertson_suite(*model, 9, 12345, m);
    EXPECT_TRUE(s.passed()) << to_string(model->kind());
    EXPECT_EQ(s.checks, 81);
    EXPECT_EQ(s.pure_states, 2);
    EXPECT_EQ(s.canonical_violations, 0);
    if (model->kind() == AnsatzKind::Identity) {
      EXPECT_LT(s.max_pure_diagonal_slack, kPureSaturationTolerance);
    }
    const auto again = robertson_suite(*model, 9, 12345, m);
    EXPECT_EQ(again.min_slack, s.min_slack);
  }
}
