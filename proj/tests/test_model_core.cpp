#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gup/model_core.hpp"

using namespace gup;

namespace {

// 40-digit reference values, rounded to double.
constexpr double kCosh2At1 = 2.3810978455418157298;
constexpr double kArctanGAt1 = 3.4674011002723396547;
constexpr double kTanh1 = 0.76159415595576488812;
constexpr double kArctanHAt1 = 0.6390929267718916267;
constexpr double kSinhRatio02 = 1.0066800127054699381;  // sinh(0.2)/0.2
constexpr double kSinhCoshSlack2 = 3.8224792992819381122;  // sinh(4)/4 - 3
constexpr double kTanhSlack1 = 0.41997434161402606939;     // 1 - tanh^2(1)
constexpr double kArctanTransverse01 = 1.0163690132242849228;
constexpr double kArctanTransverse1 = 2.2159915174651268225;
constexpr double kSqrtBound1 = 1.862095889118586625;
constexpr double kTanhDH05 = -0.27557316310818421371;    // d/dr [tanh r / r] at 0.5
constexpr double kTanhDG05 = 1.1752011936438014569;      // d/dr cosh^2 r at 0.5
constexpr double kArctanDH05 = -0.45840601644777403482;  // d/dr H at r = 0.5

AnsatzModel model(AnsatzKind k, double hbar = 1.0, double pm = 1.0) {
  return AnsatzModel(k, PhysicalScales{hbar, pm});
}

constexpr AnsatzKind kAllKinds[] = {AnsatzKind::Identity, AnsatzKind::TanhCap, AnsatzKind::ArctanCap,
                                    AnsatzKind::KmmPositionWeighted, AnsatzKind::KmmMomentumWeighted};

}  // namespace

TEST(PhysicalScales, RejectsNonPositive) {
  EXPECT_THROW((PhysicalScales{-1.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PhysicalScales{1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_THROW((PhysicalScales{NAN, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW(AnsatzModel(AnsatzKind::TanhCap, {1.0, -2.0}), std::invalid_argument);
  EXPECT_DOUBLE_EQ((PhysicalScales{2.0, 4.0}.length_scale()), 0.5);
}

TEST(AnsatzKind, NamesRoundTrip) {
  for (auto k : kAllKinds) EXPECT_EQ(parse_ansatz_kind(to_string(k)), k);
  EXPECT_THROW(parse_ansatz_kind("cosh"), std::invalid_argument);
}

TEST(EvalG, ReferenceValues) {
  EXPECT_EQ(eval_G(model(AnsatzKind::TanhCap), 0.0), 1.0);
  EXPECT_NEAR(eval_G(model(AnsatzKind::TanhCap), 1.0), kCosh2At1, 4e-16 * kCosh2At1);
  EXPECT_NEAR(eval_G(model(AnsatzKind::ArctanCap), 1.0), kArctanGAt1, 4e-16 * kArctanGAt1);
  EXPECT_DOUBLE_EQ(eval_G(model(AnsatzKind::KmmPositionWeighted), 1.0), 2.0);
  EXPECT_EQ(eval_G(model(AnsatzKind::KmmMomentumWeighted), 3.0), 1.0);
  EXPECT_EQ(eval_G(model(AnsatzKind::Identity), 3.0), 1.0);
  // p_M = 2 rescales the argument
  EXPECT_NEAR(eval_G(model(AnsatzKind::TanhCap, 1.0, 2.0), 2.0), kCosh2At1, 4e-16 * kCosh2At1);
}

TEST(EvalH, ReferenceValues) {
  for (auto k : kAllKinds) EXPECT_EQ(eval_H(model(k), 0.0), 1.0);
  EXPECT_NEAR(eval_H(model(AnsatzKind::TanhCap), 1.0), kTanh1, 4e-16);
  EXPECT_NEAR(eval_H(model(AnsatzKind::ArctanCap), 1.0), kArctanHAt1, 4e-16);
  EXPECT_DOUBLE_EQ(eval_H(model(AnsatzKind::KmmMomentumWeighted), 1.0), 4.0 / 3.0);
}

TEST(EvalGH, NegativeMomentumRejected) {
  for (auto k : kAllKinds) {
    EXPECT_THROW(eval_G(model(k), -1e-3), std::domain_error);
    EXPECT_THROW(eval_H(model(k), -1e-3), std::domain_error);
  }
}

TEST(EvalGH, ContinuousAcrossTaylorBranch) {
  for (auto k : kAllKinds) {
    const auto m = model(k);
    const double below = 0.999e-8, above = 1.001e-8;
    EXPECT_NEAR(m.H(below), m.H(above), 1e-15);
    EXPECT_NEAR(m.G(below), m.G(above), 1e-15);
  }
  // H'/|p| switches to its series at |p|/p_M = 1e-2 (tanh) and pi r/2 = 1e-2 (arctan)
  for (auto [k, edge] : {std::pair{AnsatzKind::TanhCap, 1e-2}, std::pair{AnsatzKind::ArctanCap, 2e-2 / std::numbers::pi}}) {
    const auto m = model(k);
    EXPECT_NEAR(m.H_slope_over_p(edge * (1 - 1e-9)), m.H_slope_over_p(edge * (1 + 1e-9)), 1e-9);
  }
}

TEST(EvalGH, LowMomentumLimit) {
  for (auto k : kAllKinds) {
    const auto m = model(k);
    EXPECT_NEAR(m.G(1e-9), 1.0, 1e-15);
    EXPECT_NEAR(m.H(1e-9), 1.0, 1e-15);
  }
}

TEST(EvalGH, Derivatives) {
  EXPECT_NEAR(model(AnsatzKind::TanhCap).dH(0.5), kTanhDH05, 1e-14);
  EXPECT_NEAR(model(AnsatzKind::TanhCap).dG(0.5), kTanhDG05, 1e-14);
  EXPECT_NEAR(model(AnsatzKind::ArctanCap).dH(0.5), kArctanDH05, 1e-14);
  // p_M = 4: d/dp = (1/p_M) d/dr
  EXPECT_NEAR(model(AnsatzKind::TanhCap, 1.0, 4.0).dH(2.0), kTanhDH05 / 4.0, 1e-14);
}

TEST(EvalGH, DerivativesMatchCentralDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.02, 4.0);
  for (auto k : kAllKinds) {
    const auto m = model(k);
    for (int n = 0; n < 50; ++n) {
      const double p = u(rng), h = 1e-5;
      const double dg = (m.G(p + h) - m.G(p - h)) / (2 * h);
      const double dh = (m.H(p + h) - m.H(p - h)) / (2 * h);
      EXPECT_NEAR(m.dG(p), dg, 1e-7 * std::max(1.0, std::abs(dg))) << to_string(k) << " p=" << p;
      EXPECT_NEAR(m.dH(p), dh, 1e-7 * std::max(1.0, std::abs(dh))) << to_string(k) << " p=" << p;
    }
  }
}

TEST(CappedMomentum, Values) {
  const auto t = model(AnsatzKind::TanhCap);
  const Vec3 zero = capped_momentum(t, {0.0, 0.0, 0.0});
  EXPECT_EQ(zero, (Vec3{0.0, 0.0, 0.0}));
  EXPECT_NEAR(norm(capped_momentum(t, {1000.0, 0.0, 0.0})), 1.0, 1e-6);
  const Vec3 v{0.3, -1.2, 2.5};
  EXPECT_EQ(capped_momentum(model(AnsatzKind::Identity), v), v);
}

TEST(CappedMomentum, MonotoneAndBounded) {
  for (auto k : {AnsatzKind::TanhCap, AnsatzKind::ArctanCap}) {
    const auto m = model(k, 1.0, 1.5);
    double prev = 0.0;
    for (double r = 1e-3; r < 15.0; r *= 1.05) {  // tanh rounds to 1 beyond ~19
      const double n = norm(capped_momentum(m, {0.0, r * 1.5, 0.0}));
      EXPECT_GT(n, prev);
      EXPECT_LE(n, 1.5);
      prev = n;
    }
  }
  for (auto k : {AnsatzKind::Identity, AnsatzKind::KmmPositionWeighted, AnsatzKind::KmmMomentumWeighted})
    EXPECT_GT(norm(capped_momentum(model(k), {100.0, 0.0, 0.0})), 99.0);
}

TEST(CappedMomentum, EvenUnderReflection) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 2.0);
  for (auto k : kAllKinds) {
    for (int n = 0; n < 20; ++n) {
      const Vec3 p{g(rng), g(rng), g(rng)};
      const Vec3 a = capped_momentum(model(k), p), b = capped_momentum(model(k), {-p[0], -p[1], -p[2]});
      for (int i = 0; i < 3; ++i) EXPECT_EQ(a[i], -b[i]);
    }
  }
}

TEST(ConditionResidual, CappedModelsVanish) {
  EXPECT_NEAR(condition_residual_1d(model(AnsatzKind::TanhCap), 0.5), 0.0, 1e-12);
  EXPECT_NEAR(condition_residual_1d(model(AnsatzKind::ArctanCap), 3.0), 0.0, 1e-12);
  EXPECT_NEAR(condition_residual_1d(model(AnsatzKind::KmmPositionWeighted), 1.0), 1.0, 1e-15);
  EXPECT_THROW(condition_residual_1d(model(AnsatzKind::TanhCap), 0.0), std::domain_error);
}

TEST(ConditionResidual, LogSweep) {
  for (auto k : {AnsatzKind::TanhCap, AnsatzKind::ArctanCap}) {
    const auto m = model(k, 1.0, 3.0);
    for (int n = 0; n < 10000; ++n) {
      const double r = 1e-6 * std::pow(1e7, n / 9999.0);
      ASSERT_LT(std::abs(condition_residual_1d(m, r * 3.0)), 1e-12) << to_string(k) << " r=" << r;
    }
  }
}

TEST(CommutatorKernel, ReferenceValues) {
  const auto t = model(AnsatzKind::TanhCap);
  EXPECT_NEAR(commutator_kernel(t, KernelForm::Exact, {0.7, 0.0, 0.0}, 0, 0), 1.0, 1e-15);
  EXPECT_NEAR(commutator_kernel(t, KernelForm::Exact, {0.1, 0.0, 0.0}, 1, 1), kSinhRatio02, 1e-15);
  EXPECT_NEAR(commutator_kernel(t, KernelForm::PaperSecondOrder, {0.1, 0.0, 0.0}, 1, 1), 1.005, 1e-15);
  EXPECT_NEAR(commutator_kernel(t, KernelForm::TaylorSecondOrder, {0.1, 0.0, 0.0}, 1, 1),
              1.0 + 0.02 / 3.0, 1e-15);
  const auto a = model(AnsatzKind::ArctanCap);
  EXPECT_NEAR(commutator_kernel(a, KernelForm::Exact, {0.0, 0.1, 0.0}, 0, 0), kArctanTransverse01, 1e-15);
  EXPECT_NEAR(commutator_kernel(a, KernelForm::Exact, {0.0, 0.0, 1.0}, 1, 1), kArctanTransverse1, 1e-15);
  EXPECT_NEAR(commutator_kernel(a, KernelForm::SqrtLowerBound, {0.0, 0.0, 1.0}, 0, 0), kSqrtBound1, 1e-15);
}

TEST(CommutatorKernel, AtOriginIsDelta) {
  for (auto k : kAllKinds)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_EQ(commutator_kernel(model(k), KernelForm::Exact, {0.0, 0.0, 0.0}, i, j), i == j ? 1.0 : 0.0);
}

TEST(CommutatorKernel, OffDiagonalVanishesForAxisAlignedMomentum) {
  for (auto k : kAllKinds) {
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 p{};
      p[axis] = 0.8;
      for (int other = 0; other < 3; ++other) {
        if (other == axis) continue;
        EXPECT_EQ(commutator_kernel(model(k), KernelForm::Exact, p, axis, other), 0.0);
        EXPECT_EQ(commutator_kernel(model(k), KernelForm::Exact, p, other, axis), 0.0);
      }
    }
  }
}

TEST(CommutatorKernel, SymmetricAndRotationInvariantTrace) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto k : kAllKinds) {
    const auto m = model(k);
    for (int n = 0; n < 20; ++n) {
      const Vec3 p{g(rng), g(rng), g(rng)};
      double trace = 0.0;
      for (int i = 0; i < 3; ++i) {
        trace += commutator_kernel(m, KernelForm::Exact, p, i, i);
        for (int j = 0; j < 3; ++j)
          EXPECT_DOUBLE_EQ(commutator_kernel(m, KernelForm::Exact, p, i, j),
                           commutator_kernel(m, KernelForm::Exact, p, j, i));
      }
      const auto [t, l] = kernel_coefficients(m, KernelForm::Exact, norm(p));
      EXPECT_NEAR(trace, 2.0 * t + l, 1e-12 * (2.0 * t + l));
    }
  }
}

TEST(CommutatorKernel, ExactMatchesGeneralForm) {
  // t = G H, l = G (pH)'
  for (auto k : kAllKinds) {
    const auto m = model(k);
    for (double p : {1e-4, 0.05, 0.3, 1.0, 2.5}) {
      const auto [t, l] = kernel_coefficients(m, KernelForm::Exact, p);
      EXPECT_NEAR(t, m.G(p) * m.H(p), 1e-13 * t);
      EXPECT_NEAR(l, m.G(p) * m.momentum_slope(p), 1e-13 * l);
    }
  }
}

TEST(CommutatorKernel, UnsupportedFormsRejected) {
  EXPECT_THROW(commutator_kernel(model(AnsatzKind::TanhCap), KernelForm::SqrtLowerBound, {1, 0, 0}, 0, 0),
               std::invalid_argument);
  EXPECT_THROW(commutator_kernel(model(AnsatzKind::Identity), KernelForm::PaperSecondOrder, {1, 0, 0}, 0, 0),
               std::invalid_argument);
  EXPECT_THROW(commutator_kernel(model(AnsatzKind::TanhCap), KernelForm::Exact, {1, 0, 0}, 3, 0),
               std::out_of_range);
}

TEST(CommutatorKernel, TanhExactAbovePaperSecondOrder) {
  const auto m = model(AnsatzKind::TanhCap);
  for (double r = 1e-6; r <= 10.0; r *= 1.01) {
    EXPECT_GE(kernel_coefficients(m, KernelForm::Exact, r)[0],
              kernel_coefficients(m, KernelForm::PaperSecondOrder, r)[0]);
  }
}

TEST(CommutatorKernel, ArctanSecondOrderIsNotALowerBound) {
  // the alternating series: the expansion overshoots the exact kernel
  const auto m = model(AnsatzKind::ArctanCap);
  EXPECT_LT(kernel_coefficients(m, KernelForm::Exact, 0.1)[0],
            kernel_coefficients(m, KernelForm::PaperSecondOrder, 0.1)[0]);
  for (double r = 1e-6; r <= 10.0; r *= 1.01) {
    const double exact = kernel_coefficients(m, KernelForm::Exact, r)[0];
    const double root = kernel_coefficients(m, KernelForm::SqrtLowerBound, r)[0];
    EXPECT_GE(exact, root * (1.0 - 1e-15));
    EXPECT_GE(root, 1.0);
  }
}

TEST(CommutatorKernel, TaylorDiscrepancyIsFourthOrder) {
  for (auto k : kAllKinds) {
    const auto m = model(k);
    for (double r = 0.3; r > 0.03; r *= 0.5) {
      auto gap = [&](double x) {
        const auto e = kernel_coefficients(m, KernelForm::Exact, x);
        const auto t = kernel_coefficients(m, KernelForm::TaylorSecondOrder, x);
        return std::abs(e[0] - t[0]) + std::abs(e[1] - t[1]);
      };
      if (!model(k).capped()) {
        EXPECT_NEAR(gap(r), 0.0, 1e-15);  // quadratic kernels are their own expansion
        continue;
      }
      EXPECT_NEAR(gap(r) / gap(0.5 * r), 16.0, 0.25 * 16.0) << to_string(k) << " r=" << r;
    }
  }
}

TEST(ScalarBounds, ReferenceSlacks) {
  EXPECT_NEAR(scalar_bound_check(BoundId::TanhSquaredBelowSquare, 1.0), kTanhSlack1, 1e-15);
  EXPECT_NEAR(scalar_bound_check(BoundId::SinhCoshAboveQuadratic, 2.0), kSinhCoshSlack2, 1e-14);
  EXPECT_NEAR(scalar_bound_check(BoundId::ArctanRatioAboveSqrt, 1e-7), 0.0, 1e-13);
  EXPECT_THROW(scalar_bound_check(BoundId::SqrtAboveOne, 0.0), std::domain_error);
  EXPECT_THROW(parse_bound_id("nope"), std::invalid_argument);
  for (auto id : kAllBounds) EXPECT_EQ(parse_bound_id(to_string(id)), id);
}

TEST(ScalarBounds, HoldOnRandomPoints) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(std::log(1e-6), std::log(50.0));
  for (int n = 0; n < 100000; ++n) {
    const double x = std::exp(u(rng));
    for (auto id : kAllBounds) ASSERT_GE(scalar_bound_check(id, x), -1e-12) << to_string(id) << " x=" << x;
  }
}
