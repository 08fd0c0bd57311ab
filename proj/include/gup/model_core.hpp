#pragma once

// Scalar layer of the GUP laboratory: physical scales, the (G, H) ansatz
// families, [X_i, P_j] kernels and the scalar inequalities used by the
// uncertainty estimates. Everything here is a pure function of its inputs.

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gup {

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& v) { return std::hypot(v[0], v[1], v[2]); }

/// hbar and the momentum cap p_M. All other scales derive from these two.
struct PhysicalScales {
  double hbar = 1.0;
  double p_max = 1.0;

  void validate() const {
    if (!(hbar > 0.0) || !std::isfinite(hbar))
      throw std::invalid_argument("hbar must be finite and > 0");
    if (!(p_max > 0.0) || !std::isfinite(p_max))
      throw std::invalid_argument("p_max must be finite and > 0");
    if (!std::isfinite(length_scale()) || !(length_scale() > 0.0))
      throw std::invalid_argument("hbar/p_max is not a finite positive length");
  }

  /// l0 = hbar / p_M
  double length_scale() const { return hbar / p_max; }
};

enum class AnsatzKind {
  Identity,
  TanhCap,
  ArctanCap,
  KmmPositionWeighted,
  KmmMomentumWeighted,
};

inline std::string_view to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::Identity: return "identity";
    case AnsatzKind::TanhCap: return "tanh";
    case AnsatzKind::ArctanCap: return "arctan";
    case AnsatzKind::KmmPositionWeighted: return "kmm-g";
    case AnsatzKind::KmmMomentumWeighted: return "kmm-h";
  }
  return "unknown";
}

inline AnsatzKind parse_ansatz_kind(std::string_view name) {
  for (auto k : {AnsatzKind::Identity, AnsatzKind::TanhCap, AnsatzKind::ArctanCap,
                 AnsatzKind::KmmPositionWeighted, AnsatzKind::KmmMomentumWeighted}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "'");
}

namespace detail {

// Below this value of |p|/p_M the removable singularities switch to Taylor forms.
inline constexpr double kSmallRatio = 1e-8;
// Derivative quantities (H'/|p|) lose digits to cancellation much earlier.
inline constexpr double kSeriesRatio = 1e-2;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

inline void require_nonnegative(double p_norm) {
  if (!(p_norm >= 0.0)) throw std::domain_error("momentum norm must be >= 0");
}

}  // namespace detail

/// A named (G, H) pair: X_i = i hbar G(|p|) d/dp_i and P_i = p_i H(|p|).
///
/// Derivatives are taken with respect to |p| (not |p|/p_M), so dG() carries
/// units of inverse momentum.
class AnsatzModel {
 public:
  AnsatzModel() = default;
  AnsatzModel(AnsatzKind kind, PhysicalScales scales) : kind_(kind), scales_(scales) {
    scales_.validate();
  }

  AnsatzKind kind() const { return kind_; }
  const PhysicalScales& scales() const { return scales_; }
  double p_max() const { return scales_.p_max; }
  double hbar() const { return scales_.hbar; }

  /// True when |P| < p_M for every momentum.
  bool capped() const { return kind_ == AnsatzKind::TanhCap || kind_ == AnsatzKind::ArctanCap; }

  double G(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::TanhCap: {
        const double c = std::cosh(r);
        return c * c;
      }
      case AnsatzKind::ArctanCap: {
        const double x = detail::kHalfPi * r;
        return 1.0 + x * x;
      }
      case AnsatzKind::KmmPositionWeighted: return 1.0 + r * r;
      case AnsatzKind::Identity:
      case AnsatzKind::KmmMomentumWeighted: return 1.0;
    }
    return 1.0;
  }

  double H(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::TanhCap:
        if (r < detail::kSmallRatio) return 1.0 - r * r / 3.0;
        return std::tanh(r) / r;
      case AnsatzKind::ArctanCap: {
        const double x = detail::kHalfPi * r;
        if (x < detail::kSmallRatio) return 1.0 - x * x / 3.0;
        return std::atan(x) / x;
      }
      case AnsatzKind::KmmMomentumWeighted: return 1.0 + r * r / 3.0;
      case AnsatzKind::Identity:
      case AnsatzKind::KmmPositionWeighted: return 1.0;
    }
    return 1.0;
  }

  /// dG/d|p|
  double dG(double p_norm) const { return G_slope_over_p(p_norm) * p_norm; }

  /// dH/d|p|
  double dH(double p_norm) const { return H_slope_over_p(p_norm) * p_norm; }

  /// G'(|p|)/|p|, finite at p = 0.
  double G_slope_over_p(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double pm2 = p_max() * p_max();
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::TanhCap:
        // d/dp cosh^2(p/p_M) = sinh(2r)/p_M
        if (r < detail::kSmallRatio) return (2.0 + 4.0 * r * r / 3.0) / pm2;
        return std::sinh(2.0 * r) / (r * pm2);
      case AnsatzKind::ArctanCap: return 2.0 * detail::kHalfPi * detail::kHalfPi / pm2;
      case AnsatzKind::KmmPositionWeighted: return 2.0 / pm2;
      case AnsatzKind::Identity:
      case AnsatzKind::KmmMomentumWeighted: return 0.0;
    }
    return 0.0;
  }

  /// H'(|p|)/|p|, finite at p = 0.
  double H_slope_over_p(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double pm2 = p_max() * p_max();
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::TanhCap: {
        if (r < detail::kSeriesRatio) {
          const double r2 = r * r;
          return (-2.0 / 3.0 + r2 * (8.0 / 15.0 - r2 * 34.0 / 105.0)) / pm2;
        }
        const double sech = 1.0 / std::cosh(r);
        return (sech * sech / r - std::tanh(r) / (r * r)) / (r * pm2);
      }
      case AnsatzKind::ArctanCap: {
        const double a = detail::kHalfPi;
        const double x = a * r;
        double d_over_x;  // (d/dx [atan(x)/x]) / x
        if (x < detail::kSeriesRatio) {
          const double x2 = x * x;
          d_over_x = -2.0 / 3.0 + x2 * (4.0 / 5.0 - x2 * 6.0 / 7.0);
        } else {
          d_over_x = (1.0 / (x * (1.0 + x * x)) - std::atan(x) / (x * x)) / x;
        }
        return a * a * d_over_x / pm2;
      }
      case AnsatzKind::KmmMomentumWeighted: return 2.0 / (3.0 * pm2);
      case AnsatzKind::Identity:
      case AnsatzKind::KmmPositionWeighted: return 0.0;
    }
    return 0.0;
  }

  /// d/dp [p H(p)], the slope of the 1D momentum map.
  double momentum_slope(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::TanhCap: {
        const double sech = 1.0 / std::cosh(r);
        return sech * sech;
      }
      case AnsatzKind::ArctanCap: {
        const double x = detail::kHalfPi * r;
        return 1.0 / (1.0 + x * x);
      }
      case AnsatzKind::KmmMomentumWeighted: return 1.0 + r * r;
      case AnsatzKind::Identity:
      case AnsatzKind::KmmPositionWeighted: return 1.0;
    }
    return 1.0;
  }

  /// Closed-form transverse coefficient G*H of the exact kernel.
  double transverse_coefficient(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::TanhCap:
        // sinh(r)cosh(r)/r
        if (r < detail::kSmallRatio) return 1.0 + 2.0 * r * r / 3.0;
        return std::sinh(2.0 * r) / (2.0 * r);
      case AnsatzKind::ArctanCap: {
        const double x = detail::kHalfPi * r;
        if (x < detail::kSmallRatio) return 1.0 + 2.0 * x * x / 3.0;
        return (1.0 + x * x) * std::atan(x) / x;
      }
      case AnsatzKind::KmmPositionWeighted: return 1.0 + r * r;
      case AnsatzKind::KmmMomentumWeighted: return 1.0 + r * r / 3.0;
      case AnsatzKind::Identity: return 1.0;
    }
    return 1.0;
  }

  /// Closed-form longitudinal coefficient G*(pH)' of the exact kernel.
  double longitudinal_coefficient(double p_norm) const {
    detail::require_nonnegative(p_norm);
    const double r = p_norm / p_max();
    switch (kind_) {
      case AnsatzKind::KmmPositionWeighted:
      case AnsatzKind::KmmMomentumWeighted: return 1.0 + r * r;
      case AnsatzKind::TanhCap:
      case AnsatzKind::ArctanCap:
      case AnsatzKind::Identity: return 1.0;
    }
    return 1.0;
  }

  /// r^2 coefficients of the Taylor expansion of the transverse and
  /// longitudinal kernel parts, r = |p|/p_M.
  std::array<double, 2> taylor_second_order_coefficients() const {
    const double a2 = detail::kHalfPi * detail::kHalfPi;
    switch (kind_) {
      case AnsatzKind::TanhCap: return {2.0 / 3.0, 0.0};
      case AnsatzKind::ArctanCap: return {2.0 * a2 / 3.0, 0.0};
      case AnsatzKind::KmmPositionWeighted: return {1.0, 1.0};
      case AnsatzKind::KmmMomentumWeighted: return {1.0 / 3.0, 1.0};
      case AnsatzKind::Identity: return {0.0, 0.0};
    }
    return {0.0, 0.0};
  }

 private:
  AnsatzKind kind_ = AnsatzKind::Identity;
  PhysicalScales scales_{};
};

inline double eval_G(const AnsatzModel& model, double p_norm) { return model.G(p_norm); }
inline double eval_H(const AnsatzModel& model, double p_norm) { return model.H(p_norm); }

/// P_i = p_i H(|p|), applied to a momentum vector.
inline Vec3 capped_momentum(const AnsatzModel& model, const Vec3& p) {
  const double h = model.H(norm(p));
  return {p[0] * h, p[1] * h, p[2] * h};
}

/// G(p) d/dp[p H(p)] - 1 with analytic derivatives.
inline double condition_residual_1d(const AnsatzModel& model, double p) {
  if (!(p > 0.0)) throw std::domain_error("condition residual requires p > 0");
  return model.G(p) * model.momentum_slope(p) - 1.0;
}

enum class KernelForm { Exact, PaperSecondOrder, TaylorSecondOrder, SqrtLowerBound };

inline std::string_view to_string(KernelForm form) {
  switch (form) {
    case KernelForm::Exact: return "exact";
    case KernelForm::PaperSecondOrder: return "paper_second_order";
    case KernelForm::TaylorSecondOrder: return "taylor_second_order";
    case KernelForm::SqrtLowerBound: return "sqrt_lower_bound";
  }
  return "unknown";
}

inline bool kernel_supported(AnsatzKind kind, KernelForm form) {
  switch (form) {
    case KernelForm::Exact:
    case KernelForm::TaylorSecondOrder: return true;
    case KernelForm::PaperSecondOrder:
      return kind == AnsatzKind::TanhCap || kind == AnsatzKind::ArctanCap;
    case KernelForm::SqrtLowerBound: return kind == AnsatzKind::ArctanCap;
  }
  return false;
}

/// Coefficients (transverse, longitudinal) of a kernel form at |p|.
/// kernel_ij = t * (delta_ij - n_i n_j) + l * n_i n_j with n = p/|p|.
inline std::array<double, 2> kernel_coefficients(const AnsatzModel& model, KernelForm form,
                                                 double p_norm) {
  if (!kernel_supported(model.kind(), form))
    throw std::invalid_argument("kernel form '" + std::string(to_string(form)) +
                                "' is not defined for model '" +
                                std::string(to_string(model.kind())) + "'");
  detail::require_nonnegative(p_norm);
  const double r = p_norm / model.p_max();
  const double a2 = detail::kHalfPi * detail::kHalfPi;
  switch (form) {
    case KernelForm::Exact:
      return {model.transverse_coefficient(p_norm), model.longitudinal_coefficient(p_norm)};
    case KernelForm::PaperSecondOrder: {
      const double c = model.kind() == AnsatzKind::TanhCap ? 0.5 : 2.0 * a2 / 3.0;
      return {1.0 + c * r * r, 1.0};
    }
    case KernelForm::TaylorSecondOrder: {
      const auto [t2, l2] = model.taylor_second_order_coefficients();
      return {1.0 + t2 * r * r, 1.0 + l2 * r * r};
    }
    case KernelForm::SqrtLowerBound: {
      const double x = detail::kHalfPi * r;
      return {std::sqrt(1.0 + x * x), 1.0};
    }
  }
  return {1.0, 1.0};
}

/// The scalar k(p) with [X_i, P_j] psi = i hbar k(p) psi. Axes are 0-based.
inline double commutator_kernel(const AnsatzModel& model, KernelForm form, const Vec3& p, int i,
                                int j) {
  if (i < 0 || i > 2 || j < 0 || j > 2) throw std::out_of_range("axis must be 0, 1 or 2");
  const double p_norm = norm(p);
  const auto [t, l] = kernel_coefficients(model, form, p_norm);
  const double delta = i == j ? 1.0 : 0.0;
  if (p_norm == 0.0) return delta;
  const double nn = (p[i] / p_norm) * (p[j] / p_norm);
  return t * (delta - nn) + l * nn;
}

enum class BoundId {
  TanhSquaredBelowSquare,   // tanh^2 x <= x^2
  ArctanRatioAboveSqrt,     // (1+x^2) atan(x)/x >= sqrt(1+x^2)
  SqrtAboveOne,             // sqrt(1+x^2) >= 1
  SinhCoshAboveQuadratic,   // sinh(x)cosh(x)/x >= 1 + x^2/2
  ArctanRatioAboveOne,      // (1+x^2) atan(x)/x >= 1
};

inline constexpr std::array<BoundId, 5> kAllBounds = {
    BoundId::TanhSquaredBelowSquare, BoundId::ArctanRatioAboveSqrt, BoundId::SqrtAboveOne,
    BoundId::SinhCoshAboveQuadratic, BoundId::ArctanRatioAboveOne};

inline std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::TanhSquaredBelowSquare: return "tanh2_le_x2";
    case BoundId::ArctanRatioAboveSqrt: return "arctan_ratio_ge_sqrt";
    case BoundId::SqrtAboveOne: return "sqrt_ge_one";
    case BoundId::SinhCoshAboveQuadratic: return "sinhcosh_ge_quadratic";
    case BoundId::ArctanRatioAboveOne: return "arctan_ratio_ge_one";
  }
  return "unknown";
}

inline BoundId parse_bound_id(std::string_view name) {
  for (auto id : kAllBounds) {
    if (to_string(id) == name) return id;
  }
  throw std::invalid_argument("unknown bound id '" + std::string(name) + "'");
}

/// Signed slack of a scalar inequality; nonnegative means the bound holds.
inline double scalar_bound_check(BoundId id, double x) {
  if (!(x > 0.0)) throw std::domain_error("scalar bounds are checked for x > 0");
  const double x2 = x * x;
  switch (id) {
    case BoundId::TanhSquaredBelowSquare: {
      const double t = std::tanh(x);
      return x2 - t * t;
    }
    case BoundId::ArctanRatioAboveSqrt:
      return (1.0 + x2) * std::atan(x) / x - std::sqrt(1.0 + x2);
    case BoundId::SqrtAboveOne: return std::sqrt(1.0 + x2) - 1.0;
    case BoundId::SinhCoshAboveQuadratic:
      return std::sinh(2.0 * x) / (2.0 * x) - (1.0 + 0.5 * x2);
    case BoundId::ArctanRatioAboveOne: return (1.0 + x2) * std::atan(x) / x - 1.0;
  }
  throw std::invalid_argument("unknown bound id");
}

}  // namespace gup
