#pragma once

// Canonical and modified operators acting on momentum-space states.
// Grid states are differentiated with central finite differences; closed-form
// states carry analytic derivatives on quadrature nodes (NodalState).
// Commutators are always formed by applying both operators in turn.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gup/model_core.hpp"
#include "gup/states.hpp"

namespace gup {

enum class OperatorKind {
  CanonicalPosition,
  CanonicalMomentum,
  ModifiedPosition,
  ModifiedMomentum,
  AngularMomentum,
};

/// An operator together with its (0-based) axis.
struct OperatorTag {
  OperatorKind kind;
  int axis;

  static OperatorTag canonical_position(int i) { return {OperatorKind::CanonicalPosition, i}; }
  static OperatorTag canonical_momentum(int i) { return {OperatorKind::CanonicalMomentum, i}; }
  static OperatorTag position(int i) { return {OperatorKind::ModifiedPosition, i}; }
  static OperatorTag momentum(int i) { return {OperatorKind::ModifiedMomentum, i}; }
  static OperatorTag angular_momentum(int k) { return {OperatorKind::AngularMomentum, k}; }

  bool is_derivative() const {
    return kind == OperatorKind::CanonicalPosition || kind == OperatorKind::ModifiedPosition ||
           kind == OperatorKind::AngularMomentum;
  }
};

namespace detail {

inline void check_axis(const OperatorTag& tag, int dim) {
  if (tag.axis < 0 || tag.axis >= dim)
    throw std::out_of_range("operator axis " + std::to_string(tag.axis) +
                            " out of range for a " + std::to_string(dim) + "D state");
  if (tag.kind == OperatorKind::AngularMomentum && dim != 3)
    throw std::invalid_argument("angular momentum needs a 3D state");
}

// l_k = -i hbar (p_a d_b - p_b d_a) with (k, a, b) cyclic.
inline std::pair<int, int> angular_pair(int k) { return {(k + 1) % 3, (k + 2) % 3}; }

}  // namespace detail

/// Central difference of the grid amplitudes along one axis. Order 2 or 4,
/// with one-sided closures of the same order at the two boundary layers.
inline std::vector<cplx> grid_derivative(const GridState& state, int axis) {
  const auto& axes = state.axes();
  if (axis < 0 || axis >= axes.dim) throw std::out_of_range("derivative axis out of range");
  const auto& f = state.amplitudes();
  const std::size_t stride = axes.stride(axis);
  const int count = axes.axis[axis].count;
  const double h = axes.axis[axis].spacing();
  std::vector<cplx> out(f.size());

  for (std::size_t n = 0; n < f.size(); ++n) {
    const int k = static_cast<int>((n / stride) % count);
    auto at = [&](int offset) { return f[n + static_cast<std::ptrdiff_t>(offset) * stride]; };
    cplx d;
    if (state.derivative_order() == 2) {
      if (k == 0) {
        d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      } else if (k == count - 1) {
        d = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
      } else {
        d = (at(1) - at(-1)) / (2.0 * h);
      }
    } else {
      if (k == 0) {
        d = (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h);
      } else if (k == 1) {
        d = (-3.0 * at(-1) - 10.0 * at(0) + 18.0 * at(1) - 6.0 * at(2) + at(3)) / (12.0 * h);
      } else if (k == count - 2) {
        d = (3.0 * at(1) + 10.0 * at(0) - 18.0 * at(-1) + 6.0 * at(-2) - at(-3)) / (12.0 * h);
      } else if (k == count - 1) {
        d = (25.0 * at(0) - 48.0 * at(-1) + 36.0 * at(-2) - 16.0 * at(-3) + 3.0 * at(-4)) / (12.0 * h);
      } else {
        d = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
      }
    }
    out[n] = d;
  }
  return out;
}

/// Applies an operator to a grid state. The result is not normalized; it is
/// flagged when a derivative leaves non-negligible amplitude on the boundary.
inline GridState apply(const OperatorTag& tag, const AnsatzModel& model, const GridState& state) {
  detail::check_axis(tag, state.dim());
  const cplx ih(0.0, model.hbar());
  const auto& f = state.amplitudes();
  std::vector<cplx> out(f.size());

  switch (tag.kind) {
    case OperatorKind::CanonicalMomentum:
      state.for_each_point([&](std::size_t n, const Vec3& p, double) { out[n] = p[tag.axis] * f[n]; });
      break;
    case OperatorKind::ModifiedMomentum:
      state.for_each_point([&](std::size_t n, const Vec3& p, double) {
        out[n] = p[tag.axis] * model.H(norm(p)) * f[n];
      });
      break;
    case OperatorKind::CanonicalPosition: {
      const auto d = grid_derivative(state, tag.axis);
      for (std::size_t n = 0; n < f.size(); ++n) out[n] = ih * d[n];
      break;
    }
    case OperatorKind::ModifiedPosition: {
      const auto d = grid_derivative(state, tag.axis);
      state.for_each_point([&](std::size_t n, const Vec3& p, double) {
        out[n] = ih * model.G(norm(p)) * d[n];
      });
      break;
    }
    case OperatorKind::AngularMomentum: {
      const auto [a, b] = detail::angular_pair(tag.axis);
      const auto da = grid_derivative(state, a);
      const auto db = grid_derivative(state, b);
      state.for_each_point([&](std::size_t n, const Vec3& p, double) {
        out[n] = -ih * (p[a] * db[n] - p[b] * da[n]);
      });
      break;
    }
  }
  GridState result = state.with_amplitudes(std::move(out));
  if (tag.is_derivative() && result.boundary_ratio() > kBoundaryDecay)
    result.set_accuracy_warning(true);
  return result;
}

/// Model functions needed by the operators at one momentum.
struct LocalFactors {
  double G = 1.0;
  double H = 1.0;
  double G_slope = 0.0;  // G'(|p|)/|p|
  double H_slope = 0.0;  // H'(|p|)/|p|

  static LocalFactors at(const AnsatzModel& model, const Vec3& p) {
    const double pn = norm(p);
    return {model.G(pn), model.H(pn), model.G_slope_over_p(pn), model.H_slope_over_p(pn)};
  }
};

/// Applies an operator to the jet of a state at momentum p. The gradient of
/// the result is filled only when want_grad is set (it needs the Hessian of
/// the input for derivative operators); the Hessian is never filled.
inline Jet apply_local(const OperatorTag& tag, double hbar, const LocalFactors& f, const Vec3& p,
                       const Jet& in, bool want_grad) {
  const cplx ih(0.0, hbar);
  const int i = tag.axis;
  Jet o;
  switch (tag.kind) {
    case OperatorKind::CanonicalMomentum:
    case OperatorKind::ModifiedMomentum: {
      const bool modified = tag.kind == OperatorKind::ModifiedMomentum;
      const double h = modified ? f.H : 1.0;
      const double h_slope = modified ? f.H_slope : 0.0;
      const double m = p[i] * h;
      o.value = m * in.value;
      if (want_grad) {
        for (int a = 0; a < 3; ++a) {
          const double dm = (a == i ? h : 0.0) + p[i] * p[a] * h_slope;
          o.grad[a] = dm * in.value + m * in.grad[a];
        }
      }
      break;
    }
    case OperatorKind::CanonicalPosition:
    case OperatorKind::ModifiedPosition: {
      const bool modified = tag.kind == OperatorKind::ModifiedPosition;
      const cplx c = ih * (modified ? f.G : 1.0);
      const double g_slope = modified ? f.G_slope : 0.0;
      o.value = c * in.grad[i];
      if (want_grad) {
        for (int a = 0; a < 3; ++a) o.grad[a] = ih * g_slope * p[a] * in.grad[i] + c * in.hess[a][i];
      }
      break;
    }
    case OperatorKind::AngularMomentum: {
      const auto [a, b] = detail::angular_pair(i);
      o.value = -ih * (p[a] * in.grad[b] - p[b] * in.grad[a]);
      if (want_grad) {
        for (int c = 0; c < 3; ++c) {
          o.grad[c] = -ih * ((c == a ? in.grad[b] : 0.0) + p[a] * in.hess[c][b] -
                             (c == b ? in.grad[a] : 0.0) - p[b] * in.hess[c][a]);
        }
      }
      break;
    }
  }
  return o;
}

/// Applies an operator to a closed-form state using analytic derivatives.
/// Derivative operators consume one order of the jet; multiplications keep
/// at most first derivatives.
inline NodalState apply(const OperatorTag& tag, const AnsatzModel& model, const NodalState& state) {
  detail::check_axis(tag, state.rule->dim);
  if (tag.is_derivative() && state.order < 1)
    throw std::invalid_argument("closed-form state has no derivatives left to apply this operator");
  const auto& nodes = state.rule->nodes;
  NodalState out;
  out.rule = state.rule;
  out.jets.resize(state.size());
  out.order = tag.is_derivative() ? state.order - 1 : std::min(state.order, 1);
  const bool want_grad = out.order >= 1;
  for (std::size_t n = 0; n < state.size(); ++n) {
    out.jets[n] = apply_local(tag, model.hbar(), LocalFactors::at(model, nodes[n]), nodes[n],
                              state.jets[n], want_grad);
  }
  return out;
}

inline GridState commutator_apply(const OperatorTag& a, const OperatorTag& b,
                                  const AnsatzModel& model, const GridState& state) {
  const GridState ab = apply(a, model, apply(b, model, state));
  const GridState ba = apply(b, model, apply(a, model, state));
  std::vector<cplx> out(state.size());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = ab.amplitudes()[n] - ba.amplitudes()[n];
  GridState result = state.with_amplitudes(std::move(out));
  result.set_accuracy_warning(ab.accuracy_warning() || ba.accuracy_warning());
  return result;
}

/// Values of A(B psi) - B(A psi) on the nodes of a closed-form state.
inline NodalState commutator_apply(const OperatorTag& a, const OperatorTag& b,
                                   const AnsatzModel& model, const NodalState& state) {
  const NodalState ab = apply(a, model, apply(b, model, state));
  const NodalState ba = apply(b, model, apply(a, model, state));
  NodalState out;
  out.rule = state.rule;
  out.order = 0;
  out.jets.resize(state.size());
  for (std::size_t n = 0; n < state.size(); ++n)
    out.jets[n].value = ab.jets[n].value - ba.jets[n].value;
  return out;
}

/// Outcome of checking a commutator identity on grid states.
struct ResidualReport {
  std::string identity;
  AnsatzKind model = AnsatzKind::Identity;
  int i = 0;
  int j = 0;
  int points = 0;
  double residual = 0.0;
  int points_doubled = 0;
  double residual_doubled = 0.0;
  double convergence_ratio = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

// ||a - b||_mu / ||psi||_mu on a shared grid.
inline double relative_residual(const GridState& psi, const std::vector<cplx>& a,
                                const std::vector<cplx>& b, const Measure& measure) {
  double num = 0.0, den = 0.0;
  const auto& f = psi.amplitudes();
  psi.for_each_point([&](std::size_t n, const Vec3& p, double w) {
    const double mw = w * measure.weight(p);
    num += mw * std::norm(a[n] - b[n]);
    den += mw * std::norm(f[n]);
  });
  return std::sqrt(num / den);
}

inline GridAxes doubled(const GridAxes& axes) {
  GridAxes d = axes;
  for (int a = 0; a < axes.dim; ++a) d.axis[a].count = 2 * axes.axis[a].count;
  return d;
}

// Levi-Civita symbol for 0-based indices.
inline int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

}  // namespace detail

/// ||[X_i, P_j] psi - i hbar k_exact(p) psi|| / (hbar ||psi||) on one grid.
inline double xp_residual(const AnsatzModel& model, const GridState& psi, int i, int j,
                          const Measure& measure, bool* warning = nullptr) {
  const GridState c = commutator_apply(OperatorTag::position(i), OperatorTag::momentum(j), model, psi);
  std::vector<cplx> expected(psi.size());
  const cplx ih(0.0, model.hbar());
  const auto& f = psi.amplitudes();
  psi.for_each_point([&](std::size_t n, const Vec3& p, double) {
    expected[n] = ih * commutator_kernel(model, KernelForm::Exact, p, i, j) * f[n];
  });
  if (warning) *warning = c.accuracy_warning();
  return detail::relative_residual(psi, c.amplitudes(), expected, measure) / model.hbar();
}

/// ||[X_i, X_j] psi + i hbar G G'/|p| eps_ijk l_k psi|| / (hbar l0 ||psi||).
/// The right-hand side applies l_k on the grid as well.
inline double xx_residual(const AnsatzModel& model, const GridState& psi, int i, int j,
                          const Measure& measure, bool* warning = nullptr) {
  if (i == j) throw std::invalid_argument("[X_i, X_j] identity needs i != j");
  const int k = 3 - i - j;
  const GridState c = commutator_apply(OperatorTag::position(i), OperatorTag::position(j), model, psi);
  const GridState l = apply(OperatorTag::angular_momentum(k), model, psi);
  const double eps = detail::levi_civita(i, j, k);
  const cplx minus_ih(0.0, -model.hbar());
  std::vector<cplx> expected(psi.size());
  psi.for_each_point([&](std::size_t n, const Vec3& p, double) {
    const double pn = norm(p);
    expected[n] = minus_ih * model.G(pn) * model.G_slope_over_p(pn) * eps * l.amplitudes()[n];
  });
  if (warning) *warning = c.accuracy_warning() || l.accuracy_warning();
  return detail::relative_residual(psi, c.amplitudes(), expected, measure) /
         (model.hbar() * model.scales().length_scale());
}

/// ||[P_i, P_j] psi|| / (p_M^2 ||psi||).
inline double pp_residual(const AnsatzModel& model, const GridState& psi, int i, int j,
                          const Measure& measure) {
  const GridState c = commutator_apply(OperatorTag::momentum(i), OperatorTag::momentum(j), model, psi);
  const std::vector<cplx> zero(psi.size());
  return detail::relative_residual(psi, c.amplitudes(), zero, measure) /
         (model.p_max() * model.p_max());
}

namespace detail {

template <typename Residual>
ResidualReport convergence_report(std::string identity, const AnsatzModel& model,
                                  const GaussianMixture& source, const GridAxes& axes, int order,
                                  int i, int j, Residual&& residual) {
  ResidualReport r;
  r.identity = std::move(identity);
  r.model = model.kind();
  r.i = i;
  r.j = j;
  bool warn = false;
  {
    const GridState coarse = normalize(sample_to_grid(source, axes, order), Measure::flat());
    r.points = axes.axis[0].count;
    r.residual = residual(coarse, &warn);
  }
  if (warn) r.warnings.emplace_back("boundary decay violated after differentiation (coarse grid)");
  const GridAxes fine_axes = doubled(axes);
  {
    const GridState fine = normalize(sample_to_grid(source, fine_axes, order), Measure::flat());
    r.points_doubled = fine_axes.axis[0].count;
    r.residual_doubled = residual(fine, &warn);
  }
  if (warn) r.warnings.emplace_back("boundary decay violated after differentiation (fine grid)");
  r.convergence_ratio = r.residual / r.residual_doubled;
  return r;
}

}  // namespace detail

/// [X_i, P_j] against the exact kernel at the given resolution and at twice
/// the points per axis over the same extent.
inline ResidualReport verify_xp_identity(const AnsatzModel& model, const GaussianMixture& source,
                                         const GridAxes& axes, int i, int j, int order,
                                         const Measure& measure) {
  return detail::convergence_report(
      "[X_i,P_j] = i hbar k(p)", model, source, axes, order, i, j,
      [&](const GridState& g, bool* w) { return xp_residual(model, g, i, j, measure, w); });
}

/// [X_i, X_j] against -i hbar G G'/|p| eps_ijk l_k, with the same doubling.
inline ResidualReport verify_xx_identity(const AnsatzModel& model, const GaussianMixture& source,
                                         const GridAxes& axes, int i, int j, int order,
                                         const Measure& measure) {
  return detail::convergence_report(
      "[X_i,X_j] = -i hbar G G'/|p| eps_ijk l_k", model, source, axes, order, i, j,
      [&](const GridState& g, bool* w) { return xx_residual(model, g, i, j, measure, w); });
}

}  // namespace gup
