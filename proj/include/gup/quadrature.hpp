#pragma once

// Positive-weight quadrature rules over momentum space. Closed-form states
// are evaluated at the nodes of one of these rules; grid states use the
// tensor trapezoid rule implied by their axes.

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gup/model_core.hpp"

namespace gup {

/// Uniform sampling of one axis: count points from min to max inclusive.
struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  double spacing() const { return count > 1 ? (max - min) / (count - 1) : 0.0; }
  double coordinate(int k) const { return count > 1 ? min + k * spacing() : min; }
  /// Trapezoid weight of sample k (1 for a collapsed axis).
  double weight(int k) const {
    if (count == 1) return 1.0;
    return (k == 0 || k == count - 1) ? 0.5 * spacing() : spacing();
  }

  friend bool operator==(const GridAxis&, const GridAxis&) = default;
};

/// Tensor grid in 1 or 3 dimensions. In 1D only axis 0 is active and the
/// other two axes are collapsed to the single coordinate 0.
struct GridAxes {
  std::array<GridAxis, 3> axis{};
  int dim = 3;

  std::size_t size() const {
    return static_cast<std::size_t>(axis[0].count) * axis[1].count * axis[2].count;
  }
  std::size_t index(int i0, int i1, int i2) const {
    return (static_cast<std::size_t>(i0) * axis[1].count + i1) * axis[2].count + i2;
  }
  Vec3 point(int i0, int i1, int i2) const {
    return {axis[0].coordinate(i0), axis[1].coordinate(i1), axis[2].coordinate(i2)};
  }
  std::size_t stride(int a) const {
    if (a == 0) return static_cast<std::size_t>(axis[1].count) * axis[2].count;
    if (a == 1) return static_cast<std::size_t>(axis[2].count);
    return 1;
  }

  void validate() const {
    if (dim != 1 && dim != 3) throw std::invalid_argument("grid dimension must be 1 or 3");
    for (int a = 0; a < 3; ++a) {
      const auto& ax = axis[a];
      if (a < dim) {
        if (ax.count < 16) throw std::invalid_argument("grid axes need at least 16 points");
        if (!(ax.max > ax.min)) throw std::invalid_argument("grid axis needs max > min");
      } else if (ax.count != 1 || ax.min != 0.0) {
        throw std::invalid_argument("inactive 1D grid axes must be the single point 0");
      }
    }
  }

  friend bool operator==(const GridAxes&, const GridAxes&) = default;
};

inline GridAxes make_grid_axes(std::array<GridAxis, 3> axes, int dim) {
  GridAxes g{axes, dim};
  if (dim == 1) {
    g.axis[1] = {0.0, 0.0, 1};
    g.axis[2] = {0.0, 0.0, 1};
  }
  g.validate();
  return g;
}

struct QuadratureRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  int dim = 3;

  std::size_t size() const { return nodes.size(); }
};

inline QuadratureRule trapezoid_rule(const GridAxes& axes) {
  axes.validate();
  QuadratureRule rule;
  rule.dim = axes.dim;
  rule.nodes.reserve(axes.size());
  rule.weights.reserve(axes.size());
  for (int i0 = 0; i0 < axes.axis[0].count; ++i0) {
    for (int i1 = 0; i1 < axes.axis[1].count; ++i1) {
      for (int i2 = 0; i2 < axes.axis[2].count; ++i2) {
        rule.nodes.push_back(axes.point(i0, i1, i2));
        rule.weights.push_back(axes.axis[0].weight(i0) * axes.axis[1].weight(i1) *
                               axes.axis[2].weight(i2));
      }
    }
  }
  return rule;
}

namespace detail {

using Gauss8 = boost::math::quadrature::gauss<double, 8>;

// Composite 8-point Gauss-Legendre nodes on [a, b]. Panels grow outward from
// the origin; a panel starting at distance x from 0 has width width(x).
template <typename Width>
void graded_panels(double a, double b, Width&& width, std::vector<double>& x,
                   std::vector<double>& w) {
  auto emit = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < Gauss8::abscissa().size(); ++k) {
      const double t = Gauss8::abscissa()[k], wt = Gauss8::weights()[k];
      x.push_back(mid - half * t);
      w.push_back(half * wt);
      if (t != 0.0) {
        x.push_back(mid + half * t);
        w.push_back(half * wt);
      }
    }
  };
  auto sweep = [&](double from, double to) {  // from is the end nearer 0
    const double dir = to > from ? 1.0 : -1.0;
    double pos = from;
    while (dir * (to - pos) > 0.0) {
      double step = width(std::abs(pos));
      if (dir * (to - (pos + dir * step)) < 0.25 * step) step = std::abs(to - pos);
      emit(std::min(pos, pos + dir * step), std::max(pos, pos + dir * step));
      pos += dir * step;
    }
  };
  if (a >= 0.0) {
    sweep(a, b);
  } else if (b <= 0.0) {
    sweep(b, a);
  } else {
    sweep(0.0, a);
    sweep(0.0, b);
  }
}

// Gauss-Legendre directions on the sphere: 8 cos(theta) nodes per hemisphere
// times 16 azimuths. Exact for spherical polynomials up to degree 15.
inline constexpr int kAzimuths = 16;

}  // namespace detail

/// Panel width limit: at most `width` (resolves the state), and at most half
/// the distance to the nearest complex singularity of the model functions,
/// which sit within `feature` of the origin.
struct PanelWidth {
  double width;
  double feature;  // 0 disables the limit

  double operator()(double distance) const {
    if (feature <= 0.0) return width;
    return std::min(width, 0.5 * std::hypot(distance, feature));
  }
};

/// Radial composite Gauss-Legendre on [0, r_max] times a Gauss-Legendre
/// product rule over directions. The direction set is closed under p -> -p.
inline QuadratureRule spherical_rule(double r_max, PanelWidth width) {
  if (!(r_max > 0.0) || !(width.width > 0.0))
    throw std::invalid_argument("spherical rule needs r_max > 0 and a positive panel width");
  std::vector<double> r, wr;
  detail::graded_panels(0.0, r_max, width, r, wr);
  std::vector<double> mu, mu_w;
  detail::graded_panels(-1.0, 1.0, [](double) { return 2.0; }, mu, mu_w);
  const double dphi = 2.0 * std::numbers::pi / detail::kAzimuths;

  QuadratureRule rule;
  rule.dim = 3;
  for (std::size_t k = 0; k < r.size(); ++k) {
    for (std::size_t m = 0; m < mu.size(); ++m) {
      const double s = std::sqrt(1.0 - mu[m] * mu[m]);
      for (int q = 0; q < detail::kAzimuths; ++q) {
        const double phi = q * dphi;
        rule.nodes.push_back({r[k] * s * std::cos(phi), r[k] * s * std::sin(phi), r[k] * mu[m]});
        rule.weights.push_back(wr[k] * r[k] * r[k] * mu_w[m] * dphi);
      }
    }
  }
  return rule;
}

/// Composite Gauss-Legendre in (p_1, rho) times uniform azimuths about axis 1,
/// for states symmetric under rotations about that axis. Azimuthal
/// integrands up to trigonometric degree 15 are integrated exactly.
inline QuadratureRule cylindrical_rule(double p1_min, double p1_max, double rho_max,
                                       PanelWidth width) {
  if (!(p1_max > p1_min) || !(rho_max > 0.0) || !(width.width > 0.0))
    throw std::invalid_argument("cylindrical rule needs a nonempty box and a positive panel width");
  std::vector<double> z, wz, rho, wrho;
  detail::graded_panels(p1_min, p1_max, width, z, wz);
  detail::graded_panels(0.0, rho_max, width, rho, wrho);
  const double dphi = 2.0 * std::numbers::pi / detail::kAzimuths;

  QuadratureRule rule;
  rule.dim = 3;
  for (std::size_t a = 0; a < z.size(); ++a) {
    for (std::size_t b = 0; b < rho.size(); ++b) {
      for (int q = 0; q < detail::kAzimuths; ++q) {
        const double phi = (q + 0.5) * dphi;
        rule.nodes.push_back({z[a], rho[b] * std::cos(phi), rho[b] * std::sin(phi)});
        rule.weights.push_back(wz[a] * wrho[b] * rho[b] * dphi);
      }
    }
  }
  return rule;
}

/// Composite Gauss-Legendre on a line, stored with the inactive axes at 0.
inline QuadratureRule line_rule(double min, double max, PanelWidth width) {
  if (!(max > min) || !(width.width > 0.0))
    throw std::invalid_argument("line rule needs max > min and a positive panel width");
  std::vector<double> x, w;
  detail::graded_panels(min, max, width, x, w);
  QuadratureRule rule;
  rule.dim = 1;
  for (std::size_t k = 0; k < x.size(); ++k) {
    rule.nodes.push_back({x[k], 0.0, 0.0});
    rule.weights.push_back(w[k]);
  }
  return rule;
}

}  // namespace gup
