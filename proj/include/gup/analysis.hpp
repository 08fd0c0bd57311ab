#pragma once

// Uncertainty pipelines: variances of the modified operators, Robertson
// slack, the bound functions dX(s) = (hbar/2)(1/s + c s) and variational
// scans over Gaussian families.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gup/model_core.hpp"
#include "gup/operators.hpp"
#include "gup/states.hpp"

namespace gup {

/// A variance came out negative beyond rounding: the quadrature or grid is
/// not resolving the state.
class AccuracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNegativeVarianceTolerance = 1e-10;

struct UncertaintyReport {
  int i = 0;
  int j = 0;
  double delta_x = 0.0;                 // Delta X_i
  double delta_p = 0.0;                 // Delta P_j
  double commutator_expectation = 0.0;  // <[X_i, P_j]> / i
  double robertson_slack = 0.0;         // Delta X_i Delta P_j - |<[X_i, P_j]>| / 2
  double mean_x = 0.0;                  // <X_i>
  double mean_p = 0.0;                  // <P_j>
  double canonical_delta_p = 0.0;       // Delta p_j
};

/// Accumulated expectation values of the modified operators on one state,
/// already divided by the squared norm.
struct OperatorStatistics {
  double norm2 = 0.0;  // before division
  std::array<cplx, 3> x_mean{};
  std::array<double, 3> x_sq{};  // <X psi, X psi>
  std::array<cplx, 3> p_mean{};
  std::array<double, 3> p_sq{};
  std::array<double, 3> pc_mean{};  // canonical <p_j>
  std::array<double, 3> pc_sq{};
  std::array<std::array<cplx, 3>, 3> commutator{};  // <psi, [X_i, P_j] psi>
  double p_squared = 0.0;                           // <|p|^2>
  int dim = 3;
};

namespace detail {

inline double checked_variance(double second, cplx mean, const char* what) {
  const double v = second - std::norm(mean);
  if (v < -kNegativeVarianceTolerance * std::max(second, 1e-300))
    throw AccuracyError(std::string("negative variance for ") + what + ": " + std::to_string(v));
  return std::max(v, 0.0);
}

inline void finish(OperatorStatistics& s) {
  if (!(s.norm2 > 0.0) || !std::isfinite(s.norm2)) throw std::invalid_argument("state has zero norm");
  const double inv = 1.0 / s.norm2;
  for (int a = 0; a < 3; ++a) {
    s.x_mean[a] *= inv;
    s.x_sq[a] *= inv;
    s.p_mean[a] *= inv;
    s.p_sq[a] *= inv;
    s.pc_mean[a] *= inv;
    s.pc_sq[a] *= inv;
    for (int b = 0; b < 3; ++b) s.commutator[a][b] *= inv;
  }
  s.p_squared *= inv;
}

/// Runs f(k) for k in [0, count) on the available hardware threads. Results
/// must be written to slot k so the outcome does not depend on scheduling.
template <typename F>
void parallel_for(std::size_t count, F&& f) {
  const std::size_t threads =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (threads <= 1) {
    for (std::size_t k = 0; k < count; ++k) f(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = t; k < count; k += threads) f(k);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Statistics of a closed-form state on a quadrature rule. Every operator
/// is applied node by node to the analytic jet; the commutator is formed by
/// applying X_i and P_j in both orders.
inline OperatorStatistics operator_statistics(const AnsatzModel& model, const GaussianMixture& state,
                                              const QuadratureRule& rule, const Measure& measure) {
  OperatorStatistics s;
  s.dim = state.dim();
  const int dim = s.dim;
  const double hbar = model.hbar();
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const Vec3& p = rule.nodes[n];
    const double w = rule.weights[n] * measure.weight(p);
    const Jet psi = state.jet(p);
    const LocalFactors f = LocalFactors::at(model, p);
    const cplx v = psi.value;
    s.norm2 += w * std::norm(v);
    s.p_squared += w * std::norm(v) * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);

    std::array<Jet, 3> xs, ps;
    for (int a = 0; a < dim; ++a) {
      xs[a] = apply_local(OperatorTag::position(a), hbar, f, p, psi, true);
      ps[a] = apply_local(OperatorTag::momentum(a), hbar, f, p, psi, true);
      s.x_mean[a] += w * std::conj(v) * xs[a].value;
      s.x_sq[a] += w * std::norm(xs[a].value);
      s.p_mean[a] += w * std::conj(v) * ps[a].value;
      s.p_sq[a] += w * std::norm(ps[a].value);
      s.pc_mean[a] += w * std::norm(v) * p[a];
      s.pc_sq[a] += w * std::norm(v) * p[a] * p[a];
    }
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        const cplx xp = apply_local(OperatorTag::position(a), hbar, f, p, ps[b], false).value;
        const cplx px = apply_local(OperatorTag::momentum(b), hbar, f, p, xs[a], false).value;
        s.commutator[a][b] += w * std::conj(v) * (xp - px);
      }
    }
  }
  detail::finish(s);
  return s;
}

inline OperatorStatistics operator_statistics(const AnsatzModel& model, const GaussianMixture& state,
                                              const Measure& measure,
                                              const QuadratureOptions& opts) {
  return operator_statistics(model, state, quadrature_for(state, opts), measure);
}

inline OperatorStatistics operator_statistics(const AnsatzModel& model, const GaussianMixture& state,
                                              const Measure& measure) {
  return operator_statistics(model, state, measure, QuadratureOptions::for_model(model));
}

/// Statistics of a normalized grid state, with finite-difference derivatives.
inline OperatorStatistics operator_statistics(const AnsatzModel& model, const GridState& psi,
                                              const Measure& measure) {
  OperatorStatistics s;
  s.dim = psi.dim();
  const int dim = s.dim;
  s.norm2 = inner_product(psi, psi, measure).real();
  detail::require_normalized(s.norm2);
  std::array<std::optional<GridState>, 3> xs, ps;
  for (int a = 0; a < dim; ++a) {
    xs[a] = apply(OperatorTag::position(a), model, psi);
    ps[a] = apply(OperatorTag::momentum(a), model, psi);
    s.x_mean[a] = inner_product(psi, *xs[a], measure);
    s.x_sq[a] = inner_product(*xs[a], *xs[a], measure).real();
    s.p_mean[a] = inner_product(psi, *ps[a], measure);
    s.p_sq[a] = inner_product(*ps[a], *ps[a], measure).real();
  }
  const auto m = canonical_moments(psi, measure);
  for (int a = 0; a < 3; ++a) {
    s.pc_mean[a] = m.mean[a];
    s.pc_sq[a] = m.second[a][a];
  }
  s.p_squared = m.p_squared;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const GridState xp = apply(OperatorTag::position(a), model, *ps[b]);
      const GridState px = apply(OperatorTag::momentum(b), model, *xs[a]);
      std::vector<cplx> c(psi.size());
      for (std::size_t n = 0; n < c.size(); ++n) c[n] = xp.amplitudes()[n] - px.amplitudes()[n];
      s.commutator[a][b] = inner_product(psi, psi.with_amplitudes(std::move(c)), measure);
    }
  }
  // Already normalized: divide by 1 to keep the bookkeeping in one place.
  const double n2 = s.norm2;
  s.norm2 = 1.0;
  detail::finish(s);
  s.norm2 = n2;
  return s;
}

inline UncertaintyReport uncertainty_report(const OperatorStatistics& s, int i, int j) {
  if (i < 0 || i >= s.dim || j < 0 || j >= s.dim) throw std::out_of_range("axis out of range");
  UncertaintyReport r;
  r.i = i;
  r.j = j;
  r.delta_x = std::sqrt(detail::checked_variance(s.x_sq[i], s.x_mean[i], "X"));
  r.delta_p = std::sqrt(detail::checked_variance(s.p_sq[j], s.p_mean[j], "P"));
  r.canonical_delta_p = std::sqrt(detail::checked_variance(s.pc_sq[j], s.pc_mean[j], "p"));
  r.mean_x = s.x_mean[i].real();
  r.mean_p = s.p_mean[j].real();
  const cplx c = s.commutator[i][j];
  r.commutator_expectation = (c / cplx(0.0, 1.0)).real();
  r.robertson_slack = r.delta_x * r.delta_p - 0.5 * std::abs(c);
  return r;
}

/// Delta X_i, Delta P_j and the Robertson slack of a closed-form state,
/// normalized under the measure.
inline UncertaintyReport uncertainty_report(const AnsatzModel& model, const GaussianMixture& state,
                                            const Measure& measure, int i, int j) {
  return uncertainty_report(operator_statistics(model, state, measure), i, j);
}

inline UncertaintyReport uncertainty_report(const AnsatzModel& model, const GridState& state,
                                            const Measure& measure, int i, int j) {
  return uncertainty_report(operator_statistics(model, state, measure), i, j);
}

/// dX(s) = (hbar/2)(1/s + c s) over s = Delta p > 0.
struct BoundFunction {
  double c = 1.0;
  double hbar = 1.0;

  /// c = 1/p_M^2
  static BoundFunction tanh_bound(const PhysicalScales& s) {
    return {1.0 / (s.p_max * s.p_max), s.hbar};
  }
  /// c = pi^2 / (8 p_M^2)
  static BoundFunction arctan_bound(const PhysicalScales& s) {
    return {std::numbers::pi * std::numbers::pi / (8.0 * s.p_max * s.p_max), s.hbar};
  }
  /// The bound function matching a capped model (throws for other kinds).
  static BoundFunction for_model(const AnsatzModel& m) {
    if (m.kind() == AnsatzKind::TanhCap) return tanh_bound(m.scales());
    if (m.kind() == AnsatzKind::ArctanCap) return arctan_bound(m.scales());
    throw std::invalid_argument("no bound function for model '" + std::string(to_string(m.kind())) +
                                "'");
  }

  double operator()(double s) const { return 0.5 * hbar * (1.0 / s + c * s); }
  double derivative(double s) const { return 0.5 * hbar * (c - 1.0 / (s * s)); }
  double analytic_argmin() const { return 1.0 / std::sqrt(c); }
  double analytic_min() const { return hbar * std::sqrt(c); }
};

/// Samples of a one-parameter scan and its refined minimum.
struct ScanResult {
  std::string parameter;
  std::vector<std::pair<double, double>> samples;  // (parameter, objective), ascending
  double argmin = 0.0;
  double min = 0.0;
  bool interior = false;  // false: the best sample is an endpoint
  double tolerance = 0.0;  // relative width of the final bracket
  int evaluations = 0;

  std::string status() const { return interior ? "interior minimum" : "no interior minimum"; }
};

struct ScanRange {
  double min = 0.05;
  double max = 20.0;
  int count = 40;

  void validate() const {
    if (!(min > 0.0) || !(max > min) || count < 3)
      throw std::invalid_argument("scan range needs 0 < min < max and at least 3 samples");
  }
  double at(int k) const {
    if (k == count - 1) return max;
    return min * std::exp(k * std::log(max / min) / (count - 1));
  }
};

inline constexpr double kScanTolerance = 1e-6;

/// Log-spaced sampling followed by golden-section refinement in log space
/// around the best sample. An endpoint best sample is reported as is, with
/// interior = false.
template <typename F>
ScanResult log_scan(std::string parameter, const ScanRange& range, F&& objective,
                    double rel_tol = kScanTolerance) {
  range.validate();
  ScanResult r;
  r.parameter = std::move(parameter);
  r.samples.resize(range.count);
  detail::parallel_for(range.count, [&](std::size_t k) {
    const double x = range.at(static_cast<int>(k));
    r.samples[k] = {x, objective(x)};
  });
  r.evaluations = range.count;
  int best = 0;
  for (int k = 1; k < range.count; ++k)
    if (r.samples[k].second < r.samples[best].second) best = k;
  r.argmin = r.samples[best].first;
  r.min = r.samples[best].second;
  if (best == 0 || best == range.count - 1) {
    r.interior = false;
    r.tolerance = std::log(range.max / range.min) / (range.count - 1);
    return r;
  }
  r.interior = true;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(r.samples[best - 1].first), b = std::log(r.samples[best + 1].first);
  double u1 = b - inv_phi * (b - a), u2 = a + inv_phi * (b - a);
  double f1 = objective(std::exp(u1)), f2 = objective(std::exp(u2));
  r.evaluations += 2;
  while (b - a > rel_tol) {
    if (f1 <= f2) {
      b = u2;
      u2 = u1;
      f2 = f1;
      u1 = b - inv_phi * (b - a);
      f1 = objective(std::exp(u1));
    } else {
      a = u1;
      u1 = u2;
      f1 = f2;
      u2 = a + inv_phi * (b - a);
      f2 = objective(std::exp(u2));
    }
    ++r.evaluations;
  }
  const double u = f1 <= f2 ? u1 : u2;
  const double fu = std::min(f1, f2);
  if (fu <= r.min) {
    r.argmin = std::exp(u);
    r.min = fu;
  }
  r.tolerance = b - a;
  return r;
}

inline constexpr double kBoundTolerance = 1e-10;

/// Minimum of a bound function: log scan over six decades either side of
/// the natural scale 1/sqrt(c), golden-section refinement, then bisection on
/// the sign of the analytic derivative to reach full precision.
inline ScanResult minimize_bound(const BoundFunction& bound) {
  if (!(bound.c > 0.0) || !std::isfinite(bound.c)) throw std::invalid_argument("bound needs c > 0");
  if (!(bound.hbar > 0.0)) throw std::invalid_argument("bound needs hbar > 0");
  const double scale = 1.0 / std::sqrt(bound.c);
  ScanResult r = log_scan("delta_p", {1e-6 * scale, 1e6 * scale, 40}, bound, kBoundTolerance);
  if (!r.interior) return r;
  double lo = r.argmin * std::exp(-2.0 * r.tolerance), hi = r.argmin * std::exp(2.0 * r.tolerance);
  while (bound.derivative(lo) > 0.0) lo *= 0.5;
  while (bound.derivative(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (bound.derivative(mid) < 0.0 ? lo : hi) = mid;
  }
  r.argmin = 0.5 * (lo + hi);
  r.min = bound(r.argmin);
  r.tolerance = (hi - lo) / r.argmin;
  return r;
}

/// One sample of the spherical experiment.
struct SphericalRow {
  double sigma = 0.0;
  double delta_x = 0.0;            // Delta X_1
  double delta_p = 0.0;            // Delta P_1
  double canonical_delta_p = 0.0;  // Delta p_1
  double p_perp_squared = 0.0;     // <p_perp^2> relative to axis 1
  double second_order_rhs = std::numeric_limits<double>::quiet_NaN();
  double bound_function = std::numeric_limits<double>::quiet_NaN();
};

struct SphericalResult {
  AnsatzKind model = AnsatzKind::Identity;
  MeasureKind measure = MeasureKind::WeightedByInverseG;
  ScanResult scan;  // Delta X_1 over sigma
  std::vector<SphericalRow> rows;
  SphericalRow at_min;
  double delta_x2_at_min = 0.0;
  double delta_x3_at_min = 0.0;
  double bound_min = std::numeric_limits<double>::quiet_NaN();  // min of the bound function
  double rough_estimate = 0.0;                                  // hbar / (2 p_M)
};

namespace detail {

// Second-order coefficient k in (hbar/2)(1 + k <p_perp^2>/p_M^2).
inline double second_order_perp_coefficient(AnsatzKind kind) {
  if (kind == AnsatzKind::TanhCap) return 0.5;
  if (kind == AnsatzKind::ArctanCap) return std::numbers::pi * std::numbers::pi / 8.0;
  return std::numeric_limits<double>::quiet_NaN();
}

inline SphericalRow spherical_row(const AnsatzModel& model, const OperatorStatistics& s, double sigma) {
  const auto r = uncertainty_report(s, 0, 0);
  SphericalRow row;
  row.sigma = sigma;
  row.delta_x = r.delta_x;
  row.delta_p = r.delta_p;
  row.canonical_delta_p = r.canonical_delta_p;
  row.p_perp_squared = s.p_squared - s.pc_sq[0];
  if (model.capped()) {
    const double pm2 = model.p_max() * model.p_max();
    const double k = second_order_perp_coefficient(model.kind());
    row.second_order_rhs = 0.5 * model.hbar() * (1.0 + k * row.p_perp_squared / pm2) / r.delta_p;
    row.bound_function = BoundFunction::for_model(model)(r.canonical_delta_p);
  }
  return row;
}

}  // namespace detail

/// Delta X_1 over isotropic centered Gaussians of width sigma (sigma in
/// units of p_M), minimized by log scan and golden-section refinement.
inline SphericalResult spherical_experiment(const AnsatzModel& model, const ScanRange& sigma_range,
                                            const Measure& measure) {
  const double pm = model.p_max();
  auto stats = [&](double sigma) {
    return operator_statistics(model, GaussianState::isotropic(sigma * pm), measure);
  };
  SphericalResult out;
  out.model = model.kind();
  out.measure = measure.kind();
  out.scan = log_scan("sigma", sigma_range,
                      [&](double sigma) { return uncertainty_report(stats(sigma), 0, 0).delta_x; });
  out.rows.resize(out.scan.samples.size());
  detail::parallel_for(out.rows.size(), [&](std::size_t k) {
    const double sigma = out.scan.samples[k].first;
    out.rows[k] = detail::spherical_row(model, stats(sigma), sigma);
  });
  const auto s = stats(out.scan.argmin);
  out.at_min = detail::spherical_row(model, s, out.scan.argmin);
  out.delta_x2_at_min = uncertainty_report(s, 1, 1).delta_x;
  out.delta_x3_at_min = uncertainty_report(s, 2, 2).delta_x;
  if (model.capped()) out.bound_min = minimize_bound(BoundFunction::for_model(model)).min;
  out.rough_estimate = model.hbar() / (2.0 * pm);
  return out;
}

struct BoostedResult {
  AnsatzKind model = AnsatzKind::Identity;
  MeasureKind measure = MeasureKind::WeightedByInverseG;
  double p1 = 0.0;    // units of p_M
  ScanResult scan_x1;  // Delta X_1 over sigma
  ScanResult scan_x2;  // Delta X_2 over sigma
  double ratio = 0.0;  // Delta X_2^min / Delta X_1^min
  bool endpoint = false;
  // Orthogonal bound estimate (hbar/(2 p_M))(1 + k q / p_M^2) with q = <|p|^2>
  // of the state at the Delta X_2 minimum, and with q = p1^2.
  double p_squared_at_min = 0.0;
  double estimate_actual = std::numeric_limits<double>::quiet_NaN();
  double estimate_substituted = std::numeric_limits<double>::quiet_NaN();
  double estimate_axis1 = 0.0;  // hbar / (2 p_M)
};

namespace detail {

// k in the boosted orthogonal estimate: 1/2 for tanh, pi^2/8 for arctan.
inline double boosted_coefficient(AnsatzKind kind) {
  if (kind == AnsatzKind::TanhCap) return 0.5;
  if (kind == AnsatzKind::ArctanCap) return std::numbers::pi * std::numbers::pi / 8.0;
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// Gaussians centered at (p1, 0, 0) with isotropic width sigma (both in
/// units of p_M); Delta X_1 and Delta X_2 are minimized over sigma separately.
inline BoostedResult boosted_experiment(const AnsatzModel& model, double p1,
                                        const ScanRange& sigma_range, const Measure& measure) {
  if (!(p1 >= 0.0) || !std::isfinite(p1)) throw std::invalid_argument("p1 must be finite and >= 0");
  const double pm = model.p_max();
  auto stats = [&](double sigma) {
    const double s = sigma * pm;
    return operator_statistics(model, GaussianState({p1 * pm, 0.0, 0.0}, {s, s, s}), measure);
  };
  BoostedResult out;
  out.model = model.kind();
  out.measure = measure.kind();
  out.p1 = p1;
  out.scan_x1 = log_scan("sigma", sigma_range,
                         [&](double sigma) { return uncertainty_report(stats(sigma), 0, 0).delta_x; });
  out.scan_x2 = log_scan("sigma", sigma_range,
                         [&](double sigma) { return uncertainty_report(stats(sigma), 1, 1).delta_x; });
  out.ratio = out.scan_x2.min / out.scan_x1.min;
  out.endpoint = !out.scan_x1.interior || !out.scan_x2.interior;
  out.p_squared_at_min = stats(out.scan_x2.argmin).p_squared;
  out.estimate_axis1 = model.hbar() / (2.0 * pm);
  if (model.capped()) {
    const double k = detail::boosted_coefficient(model.kind());
    const double pm2 = pm * pm;
    out.estimate_actual = out.estimate_axis1 * (1.0 + k * out.p_squared_at_min / pm2);
    out.estimate_substituted = out.estimate_axis1 * (1.0 + k * (p1 * pm) * (p1 * pm) / pm2);
  }
  return out;
}

/// Ranges of the random superpositions, in units of p_M.
struct RandomStateOptions {
  int min_components = 2;
  int max_components = 4;
  double center_range = 2.0;  // centers uniform in [-center_range, center_range]
  double width_min = 0.1;
  double width_max = 2.0;
  int pure_every = 8;  // every pure_every-th state is a single Gaussian
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace detail

inline bool is_pure_index(std::size_t index, const RandomStateOptions& opts) {
  return opts.pure_every > 0 && index % opts.pure_every == 0;
}

/// Random superposition number `index` of the stream `seed`. A per-state
/// width scale s is drawn first and the component widths are drawn from
/// [s, min(2s, width_max)], which keeps the widths of one state comparable.
inline GaussianMixture random_state(const PhysicalScales& scales, std::uint64_t seed,
                                    std::size_t index, const RandomStateOptions& opts = {}) {
  std::mt19937_64 rng(detail::splitmix64(detail::splitmix64(seed) ^ index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double pm = scales.p_max;
  const int k = is_pure_index(index, opts)
                    ? 1
                    : opts.min_components +
                          static_cast<int>(unit(rng) * (opts.max_components - opts.min_components + 1));
  const int count = std::min(k, opts.max_components);
  const double s = opts.width_min * std::pow(opts.width_max / opts.width_min, unit(rng));
  const double w_hi = std::min(2.0 * s, opts.width_max);
  std::vector<GaussianState> comps;
  for (int c = 0; c < count; ++c) {
    Vec3 center{}, widths{};
    for (int a = 0; a < 3; ++a) center[a] = (2.0 * unit(rng) - 1.0) * opts.center_range * pm;
    for (int a = 0; a < 3; ++a) widths[a] = (s + (w_hi - s) * unit(rng)) * pm;
    const double mag = 0.2 + 0.8 * unit(rng);
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    comps.emplace_back(center, widths, 3, std::polar(mag, phase));
  }
  return GaussianMixture(std::move(comps));
}

inline constexpr double kRobertsonTolerance = 1e-8;     // times hbar
inline constexpr double kCapTolerance = 1e-10;          // times p_M
inline constexpr double kPureSaturationTolerance = 1e-6;  // times hbar

struct RobertsonSummary {
  AnsatzKind model = AnsatzKind::Identity;
  MeasureKind measure = MeasureKind::WeightedByInverseG;
  int n_states = 0;
  std::uint64_t seed = 0;
  int checks = 0;
  int violations = 0;        // slack < -1e-8 hbar
  double min_slack = 0.0;    // units of hbar
  int pure_states = 0;
  double max_pure_diagonal_slack = 0.0;  // |slack| on i = j for single Gaussians, units of hbar
  int cap_violations = 0;                // Delta P_j > p_M (capped models)
  double max_delta_p_over_pmax = 0.0;
  int canonical_violations = 0;  // Delta P_j > Delta p_j
  double max_delta_p_excess = 0.0;  // max (Delta P_j - Delta p_j) / p_M
  std::vector<std::string> failures;

  bool passed() const {
    return violations == 0 && cap_violations == 0 && failures.empty();
  }
};

/// Uncertainty reports for every (i, j) on n_states random superpositions.
inline RobertsonSummary robertson_suite(const AnsatzModel& model, int n_states, std::uint64_t seed,
                                        const Measure& measure,
                                        const RandomStateOptions& opts = {}) {
  if (n_states < 1) throw std::invalid_argument("robertson suite needs n_states >= 1");
  std::vector<std::optional<OperatorStatistics>> stats(n_states);
  std::vector<std::string> errors(n_states);
  detail::parallel_for(n_states, [&](std::size_t k) {
    try {
      stats[k] = operator_statistics(model, random_state(model.scales(), seed, k, opts), measure);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });

  RobertsonSummary sum;
  sum.model = model.kind();
  sum.measure = measure.kind();
  sum.n_states = n_states;
  sum.seed = seed;
  sum.min_slack = std::numeric_limits<double>::infinity();
  const double hbar = model.hbar(), pm = model.p_max();
  for (int k = 0; k < n_states; ++k) {
    if (!stats[k]) {
      sum.failures.push_back("state " + std::to_string(k) + ": " + errors[k]);
      continue;
    }
    const bool pure = is_pure_index(k, opts);
    if (pure) ++sum.pure_states;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        UncertaintyReport r;
        try {
          r = uncertainty_report(*stats[k], i, j);
        } catch (const std::exception& e) {
          sum.failures.push_back("state " + std::to_string(k) + ": " + e.what());
          continue;
        }
        ++sum.checks;
        const double slack = r.robertson_slack / hbar;
        sum.min_slack = std::min(sum.min_slack, slack);
        if (slack < -kRobertsonTolerance) ++sum.violations;
        if (pure && i == j)
          sum.max_pure_diagonal_slack = std::max(sum.max_pure_diagonal_slack, std::abs(slack));
        if (i == 0) {  // Delta P_j does not depend on i
          sum.max_delta_p_over_pmax = std::max(sum.max_delta_p_over_pmax, r.delta_p / pm);
          if (model.capped() && r.delta_p > pm * (1.0 + kCapTolerance)) ++sum.cap_violations;
          const double excess = (r.delta_p - r.canonical_delta_p) / pm;
          sum.max_delta_p_excess = std::max(sum.max_delta_p_excess, excess);
          if (excess > kCapTolerance) ++sum.canonical_violations;
        }
      }
    }
  }
  return sum;
}

}  // namespace gup
