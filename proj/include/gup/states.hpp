#pragma once

// Momentum-space wave functions: closed-form Gaussians (and superpositions
// of them), uniformly sampled grid states, inner-product measures and the
// canonical moments of a state.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gup/model_core.hpp"
#include "gup/quadrature.hpp"

namespace gup {

using cplx = std::complex<double>;

enum class MeasureKind { Flat, WeightedByInverseG };

/// Integration weight for inner products: 1, or 1/G(|p|) for a model.
class Measure {
 public:
  static Measure flat() { return Measure{}; }
  static Measure weighted(const AnsatzModel& model) {
    Measure m;
    m.kind_ = MeasureKind::WeightedByInverseG;
    m.model_ = model;
    return m;
  }

  MeasureKind kind() const { return kind_; }
  const std::optional<AnsatzModel>& model() const { return model_; }

  double weight(double p_norm) const {
    if (kind_ == MeasureKind::Flat) return 1.0;
    return 1.0 / model_->G(p_norm);
  }
  double weight(const Vec3& p) const { return weight(norm(p)); }

 private:
  MeasureKind kind_ = MeasureKind::Flat;
  std::optional<AnsatzModel> model_;
};

inline std::string_view to_string(MeasureKind kind) {
  return kind == MeasureKind::Flat ? "flat" : "weighted";
}

/// Value, gradient and Hessian of a wave function at one point.
struct Jet {
  cplx value{};
  std::array<cplx, 3> grad{};
  std::array<std::array<cplx, 3>, 3> hess{};
};

/// psi(p) = amplitude * exp(-sum_a (p_a - c_a)^2 / (4 sigma_a^2)).
///
/// With amplitude (2 pi)^(-d/4) prod sigma_a^(-1/2) this is normalized under
/// the flat measure and sigma_a is the standard deviation of p_a. In 1D only
/// axis 0 is used.
class GaussianState {
 public:
  GaussianState(Vec3 center, Vec3 widths, int dim = 3, cplx amplitude = 1.0)
      : center_(center), widths_(widths), dim_(dim), amplitude_(amplitude) {
    if (dim != 1 && dim != 3) throw std::invalid_argument("Gaussian dim must be 1 or 3");
    for (int a = 0; a < dim; ++a) {
      if (!(widths[a] > 0.0) || !std::isfinite(widths[a]))
        throw std::invalid_argument("Gaussian widths must be finite and > 0");
      if (!std::isfinite(center[a])) throw std::invalid_argument("Gaussian center must be finite");
    }
    if (dim == 1) {
      center_[1] = center_[2] = 0.0;
      widths_[1] = widths_[2] = 1.0;
    }
  }

  static GaussianState isotropic(double sigma, int dim = 3) {
    return GaussianState({0.0, 0.0, 0.0}, {sigma, sigma, sigma}, dim);
  }

  const Vec3& center() const { return center_; }
  const Vec3& widths() const { return widths_; }
  int dim() const { return dim_; }
  cplx amplitude() const { return amplitude_; }
  GaussianState scaled(cplx factor) const {
    GaussianState g = *this;
    g.amplitude_ *= factor;
    return g;
  }

  cplx value(const Vec3& p) const {
    double e = 0.0;
    for (int a = 0; a < dim_; ++a) {
      const double q = p[a] - center_[a];
      e += q * q / (4.0 * widths_[a] * widths_[a]);
    }
    return amplitude_ * std::exp(-e);
  }

  Jet jet(const Vec3& p) const {
    Jet j;
    j.value = value(p);
    std::array<double, 3> s{};  // d/dp_a log psi
    for (int a = 0; a < dim_; ++a) s[a] = -(p[a] - center_[a]) / (2.0 * widths_[a] * widths_[a]);
    for (int a = 0; a < dim_; ++a) {
      j.grad[a] = s[a] * j.value;
      for (int b = 0; b < dim_; ++b) {
        const double diag = a == b ? -1.0 / (2.0 * widths_[a] * widths_[a]) : 0.0;
        j.hess[a][b] = (s[a] * s[b] + diag) * j.value;
      }
    }
    return j;
  }

 private:
  Vec3 center_;
  Vec3 widths_;
  int dim_;
  cplx amplitude_;
};

/// Superposition of Gaussians sharing a dimension.
class GaussianMixture {
 public:
  GaussianMixture(const GaussianState& g) : components_{g} {}  // NOLINT: implicit by intent
  explicit GaussianMixture(std::vector<GaussianState> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("mixture needs at least one component");
    for (const auto& c : components_) {
      if (c.dim() != components_.front().dim())
        throw std::invalid_argument("mixture components must share a dimension");
    }
  }

  const std::vector<GaussianState>& components() const { return components_; }
  int dim() const { return components_.front().dim(); }

  GaussianMixture scaled(cplx factor) const {
    std::vector<GaussianState> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.scaled(factor));
    return GaussianMixture(std::move(out));
  }

  cplx value(const Vec3& p) const {
    cplx v{};
    for (const auto& c : components_) v += c.value(p);
    return v;
  }

  Jet jet(const Vec3& p) const {
    Jet total;
    for (const auto& c : components_) {
      const Jet j = c.jet(p);
      total.value += j.value;
      for (int a = 0; a < 3; ++a) {
        total.grad[a] += j.grad[a];
        for (int b = 0; b < 3; ++b) total.hess[a][b] += j.hess[a][b];
      }
    }
    return total;
  }

  /// Every component centered at the origin with equal widths on all axes.
  bool isotropic() const {
    if (dim() != 3) return false;
    const double s = components_.front().widths()[0];
    for (const auto& c : components_) {
      const auto& w = c.widths();
      if (c.center() != Vec3{0.0, 0.0, 0.0} || w[0] != s || w[1] != s || w[2] != s) return false;
    }
    return true;
  }

 private:
  std::vector<GaussianState> components_;
};

/// Distance from the origin to the nearest complex singularity of 1/G and H
/// (in |p|), or 0 when the model functions are entire.
inline double singularity_distance(const AnsatzModel& model) {
  switch (model.kind()) {
    case AnsatzKind::TanhCap: return 0.5 * std::numbers::pi * model.p_max();
    case AnsatzKind::ArctanCap: return 2.0 / std::numbers::pi * model.p_max();
    case AnsatzKind::KmmPositionWeighted: return model.p_max();
    default: return 0.0;
  }
}

/// Controls the quadrature used for closed-form states.
struct QuadratureOptions {
  double extent = 8.0;            // support is center +- extent * width
  int points = 64;                // minimum points per axis for tensor rules
  int max_points = 128;           // cap per axis for tensor rules
  double points_per_width = 1.0;  // tensor resolution floor relative to the narrowest width
  double panel_width = 1.0;       // Gauss panel width limit relative to the narrowest width
  double feature = 0.0;           // model singularity distance (0: none), see singularity_distance

  static QuadratureOptions for_model(const AnsatzModel& model) {
    QuadratureOptions o;
    o.feature = singularity_distance(model);
    return o;
  }
};

inline GridAxes support_axes(const GaussianMixture& state, const QuadratureOptions& opts) {
  const int dim = state.dim();
  std::array<GridAxis, 3> axes{};
  for (int a = 0; a < dim; ++a) {
    double lo = INFINITY, hi = -INFINITY, narrow = INFINITY;
    for (const auto& c : state.components()) {
      lo = std::min(lo, c.center()[a] - opts.extent * c.widths()[a]);
      hi = std::max(hi, c.center()[a] + opts.extent * c.widths()[a]);
      narrow = std::min(narrow, c.widths()[a]);
    }
    double h_target = narrow / opts.points_per_width;
    if (opts.feature > 0.0) h_target = std::min(h_target, opts.feature);
    const double need = std::ceil((hi - lo) / h_target) + 1.0;
    const int n = static_cast<int>(std::clamp(
        need, static_cast<double>(opts.points),
        static_cast<double>(std::max(opts.max_points, opts.points))));
    axes[a] = {lo, hi, n};
  }
  return make_grid_axes(axes, dim);
}

namespace detail {

// Every component centered on axis 1 with equal widths on axes 2 and 3.
inline bool axisymmetric(const GaussianMixture& state) {
  if (state.dim() != 3) return false;
  for (const auto& c : state.components()) {
    if (c.center()[1] != 0.0 || c.center()[2] != 0.0 || c.widths()[1] != c.widths()[2]) return false;
  }
  return true;
}

}  // namespace detail

/// Quadrature rule adapted to a closed-form state: spherical for isotropic
/// states, cylindrical for states symmetric about axis 1, Gauss panels on a
/// line in 1D, tensor trapezoid over the union of supports otherwise.
inline QuadratureRule quadrature_for(const GaussianMixture& state, const QuadratureOptions& opts) {
  double narrow = INFINITY, lo = INFINITY, hi = -INFINITY, rho = 0.0;
  for (const auto& c : state.components()) {
    for (int a = 0; a < state.dim(); ++a) narrow = std::min(narrow, c.widths()[a]);
    lo = std::min(lo, c.center()[0] - opts.extent * c.widths()[0]);
    hi = std::max(hi, c.center()[0] + opts.extent * c.widths()[0]);
    rho = std::max(rho, opts.extent * c.widths()[1]);
  }
  const PanelWidth width{narrow * opts.panel_width, opts.feature};
  if (state.dim() == 1) return line_rule(lo, hi, width);
  if (state.isotropic()) return spherical_rule(rho, width);
  if (detail::axisymmetric(state)) return cylindrical_rule(lo, hi, rho, width);
  return trapezoid_rule(support_axes(state, opts));
}

/// A closed-form state (or an operator applied to one) evaluated on the nodes
/// of a quadrature rule. `order` is how many derivatives are still available.
struct NodalState {
  std::shared_ptr<const QuadratureRule> rule;
  std::vector<Jet> jets;
  int order = 2;

  std::size_t size() const { return jets.size(); }
};

inline NodalState evaluate_nodal(const GaussianMixture& state,
                                 std::shared_ptr<const QuadratureRule> rule) {
  NodalState out;
  out.jets.reserve(rule->size());
  for (const auto& p : rule->nodes) out.jets.push_back(state.jet(p));
  out.rule = std::move(rule);
  out.order = 2;
  return out;
}

inline NodalState evaluate_nodal(const GaussianMixture& state, const QuadratureOptions& opts = {}) {
  return evaluate_nodal(state, std::make_shared<const QuadratureRule>(quadrature_for(state, opts)));
}

inline cplx inner_product(const NodalState& a, const NodalState& b, const Measure& measure) {
  if (a.rule != b.rule) throw std::invalid_argument("nodal states live on different rules");
  const auto& rule = *a.rule;
  cplx sum{};
  for (std::size_t n = 0; n < rule.size(); ++n) {
    sum += rule.weights[n] * measure.weight(rule.nodes[n]) * std::conj(a.jets[n].value) *
           b.jets[n].value;
  }
  return sum;
}

inline double squared_norm(const GaussianMixture& state, const Measure& measure,
                           const QuadratureOptions& opts = {}) {
  const QuadratureRule rule = quadrature_for(state, opts);
  double sum = 0.0;
  for (std::size_t n = 0; n < rule.size(); ++n)
    sum += rule.weights[n] * measure.weight(rule.nodes[n]) * std::norm(state.value(rule.nodes[n]));
  return sum;
}

/// Both states are evaluated on a rule covering the union of their supports.
inline cplx inner_product(const GaussianMixture& a, const GaussianMixture& b,
                          const Measure& measure, const QuadratureOptions& opts = {}) {
  if (a.dim() != b.dim()) throw std::invalid_argument("states have different dimensions");
  std::vector<GaussianState> all = a.components();
  all.insert(all.end(), b.components().begin(), b.components().end());
  const QuadratureRule rule = quadrature_for(GaussianMixture(std::move(all)), opts);
  cplx sum{};
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const auto& p = rule.nodes[n];
    sum += rule.weights[n] * measure.weight(p) * std::conj(a.value(p)) * b.value(p);
  }
  return sum;
}

inline GaussianMixture normalize(const GaussianMixture& state, const Measure& measure,
                                 const QuadratureOptions& opts = {}) {
  const double n2 = squared_norm(state, measure, opts);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::invalid_argument("state has zero norm");
  return state.scaled(1.0 / std::sqrt(n2));
}

inline GaussianState normalize(const GaussianState& state, const Measure& measure,
                               const QuadratureOptions& opts = {}) {
  const double n2 = squared_norm(GaussianMixture(state), measure, opts);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::invalid_argument("state has zero norm");
  return state.scaled(1.0 / std::sqrt(n2));
}

/// Amplitudes of a state on a uniform tensor grid.
class GridState {
 public:
  GridState(GridAxes axes, std::vector<cplx> amplitudes, int derivative_order = 4)
      : axes_(std::move(axes)), amplitudes_(std::move(amplitudes)), order_(derivative_order) {
    axes_.validate();
    if (amplitudes_.size() != axes_.size())
      throw std::invalid_argument("amplitude count does not match the grid");
    if (order_ != 2 && order_ != 4) throw std::invalid_argument("derivative order must be 2 or 4");
  }

  const GridAxes& axes() const { return axes_; }
  int dim() const { return axes_.dim; }
  int derivative_order() const { return order_; }
  const std::vector<cplx>& amplitudes() const { return amplitudes_; }
  std::vector<cplx>& amplitudes() { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }

  bool accuracy_warning() const { return accuracy_warning_; }
  void set_accuracy_warning(bool w) { accuracy_warning_ = w; }

  GridState with_amplitudes(std::vector<cplx> amplitudes) const {
    GridState g(axes_, std::move(amplitudes), order_);
    g.accuracy_warning_ = accuracy_warning_;
    return g;
  }

  /// Largest |psi|^2 on the grid boundary relative to the largest |psi|^2.
  double boundary_ratio() const {
    double peak = 0.0, edge = 0.0;
    const auto& ax = axes_.axis;
    for (int i0 = 0; i0 < ax[0].count; ++i0) {
      for (int i1 = 0; i1 < ax[1].count; ++i1) {
        for (int i2 = 0; i2 < ax[2].count; ++i2) {
          const double d = std::norm(amplitudes_[axes_.index(i0, i1, i2)]);
          peak = std::max(peak, d);
          const bool on_edge = i0 == 0 || i0 == ax[0].count - 1 ||
                               (axes_.dim == 3 && (i1 == 0 || i1 == ax[1].count - 1 || i2 == 0 ||
                                                   i2 == ax[2].count - 1));
          if (on_edge) edge = std::max(edge, d);
        }
      }
    }
    return peak > 0.0 ? edge / peak : 0.0;
  }

  template <typename F>
  void for_each_point(F&& f) const {
    const auto& ax = axes_.axis;
    std::size_t n = 0;
    for (int i0 = 0; i0 < ax[0].count; ++i0)
      for (int i1 = 0; i1 < ax[1].count; ++i1)
        for (int i2 = 0; i2 < ax[2].count; ++i2, ++n)
          f(n, axes_.point(i0, i1, i2),
            ax[0].weight(i0) * ax[1].weight(i1) * ax[2].weight(i2));
  }

 private:
  GridAxes axes_;
  std::vector<cplx> amplitudes_;
  int order_ = 4;
  bool accuracy_warning_ = false;
};

/// Boundary |psi|^2 must not exceed this fraction of the peak |psi|^2.
inline constexpr double kBoundaryDecay = 1e-10;
/// Grids sampled from a Gaussian must cover center +- this many widths.
inline constexpr double kCoverageWidths = 8.0;

inline cplx inner_product(const GridState& a, const GridState& b, const Measure& measure) {
  if (!(a.axes() == b.axes())) throw std::invalid_argument("grid states use different grids");
  cplx sum{};
  const auto& av = a.amplitudes();
  const auto& bv = b.amplitudes();
  a.for_each_point([&](std::size_t n, const Vec3& p, double w) {
    sum += w * measure.weight(p) * std::conj(av[n]) * bv[n];
  });
  return sum;
}

inline GridState normalize(const GridState& state, const Measure& measure) {
  const double n2 = inner_product(state, state, measure).real();
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw std::invalid_argument("state has zero norm");
  std::vector<cplx> amps = state.amplitudes();
  const double s = 1.0 / std::sqrt(n2);
  for (auto& v : amps) v *= s;
  return state.with_amplitudes(std::move(amps));
}

/// Axes spanning center +- extent * width with `count` points per axis.
inline GridAxes default_grid_axes(const GaussianState& g, int count = 64, double extent = 8.0) {
  std::array<GridAxis, 3> axes{};
  for (int a = 0; a < g.dim(); ++a)
    axes[a] = {g.center()[a] - extent * g.widths()[a], g.center()[a] + extent * g.widths()[a],
               count};
  return make_grid_axes(axes, g.dim());
}

inline GridState sample_to_grid(const GaussianMixture& state, const GridAxes& axes,
                                int derivative_order = 4) {
  axes.validate();
  if (axes.dim != state.dim()) throw std::invalid_argument("grid and state dimensions differ");
  constexpr double slack = 1e-12;
  for (const auto& c : state.components()) {
    for (int a = 0; a < axes.dim; ++a) {
      const double reach = kCoverageWidths * c.widths()[a];
      const double tol = slack * (std::abs(c.center()[a]) + reach);
      if (axes.axis[a].min > c.center()[a] - reach + tol ||
          axes.axis[a].max < c.center()[a] + reach - tol)
        throw std::invalid_argument("grid does not cover center +- 8 widths on axis " +
                                    std::to_string(a + 1));
    }
  }
  std::vector<cplx> amps(axes.size());
  const auto& ax = axes.axis;
  for (int i0 = 0; i0 < ax[0].count; ++i0)
    for (int i1 = 0; i1 < ax[1].count; ++i1)
      for (int i2 = 0; i2 < ax[2].count; ++i2)
        amps[axes.index(i0, i1, i2)] = state.value(axes.point(i0, i1, i2));
  GridState g(axes, std::move(amps), derivative_order);
  if (g.boundary_ratio() > kBoundaryDecay)
    throw std::invalid_argument("sampled state does not decay at the grid boundary");
  return g;
}

/// Canonical momentum moments of a normalized state.
struct Moments {
  Vec3 mean{};                                  // <p_i>
  std::array<std::array<double, 3>, 3> second{};  // <p_i p_j>
  double p_squared = 0.0;                       // <|p|^2>

  /// <p_perp^2> = <|p|^2> - <p_axis^2>
  double perpendicular(int axis) const { return p_squared - second[axis][axis]; }
  double variance(int axis) const { return second[axis][axis] - mean[axis] * mean[axis]; }
};

namespace detail {

inline constexpr double kNormalizedTolerance = 1e-8;

inline void require_normalized(double n2) {
  if (std::abs(n2 - 1.0) > kNormalizedTolerance)
    throw std::invalid_argument("state is not normalized under the measure (norm^2 = " +
                                std::to_string(n2) + ")");
}

template <typename Visit>
Moments accumulate_moments(Visit&& visit) {
  Moments m;
  double n2 = 0.0;
  visit([&](const Vec3& p, double density) {
    n2 += density;
    for (int a = 0; a < 3; ++a) {
      m.mean[a] += density * p[a];
      for (int b = 0; b < 3; ++b) m.second[a][b] += density * p[a] * p[b];
    }
  });
  require_normalized(n2);
  m.p_squared = m.second[0][0] + m.second[1][1] + m.second[2][2];
  return m;
}

}  // namespace detail

inline Moments canonical_moments(const GaussianMixture& state, const Measure& measure,
                                 const QuadratureOptions& opts = {}) {
  const QuadratureRule rule = quadrature_for(state, opts);
  return detail::accumulate_moments([&](auto&& add) {
    for (std::size_t n = 0; n < rule.size(); ++n) {
      const auto& p = rule.nodes[n];
      add(p, rule.weights[n] * measure.weight(p) * std::norm(state.value(p)));
    }
  });
}

inline Moments canonical_moments(const GridState& state, const Measure& measure) {
  const auto& amps = state.amplitudes();
  return detail::accumulate_moments([&](auto&& add) {
    state.for_each_point([&](std::size_t n, const Vec3& p, double w) {
      add(p, w * measure.weight(p) * std::norm(amps[n]));
    });
  });
}

}  // namespace gup
