#pragma once

// Serialization: JSON for reports, CSV tables, and the binary/CSV layouts of
// grid states (see README for the byte layout).

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ios>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gup/analysis.hpp"
#include "gup/operators.hpp"
#include "gup/states.hpp"

namespace gup {

using json = nlohmann::ordered_json;

/// NaN and infinities become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const PhysicalScales& s) { return {{"hbar", s.hbar}, {"p_max", s.p_max}}; }

inline json to_json(const UncertaintyReport& r) {
  return {{"i", r.i + 1},
          {"j", r.j + 1},
          {"delta_x", number(r.delta_x)},
          {"delta_p", number(r.delta_p)},
          {"commutator_expectation", number(r.commutator_expectation)},
          {"robertson_slack", number(r.robertson_slack)},
          {"mean_x", number(r.mean_x)},
          {"mean_p", number(r.mean_p)},
          {"canonical_delta_p", number(r.canonical_delta_p)}};
}

inline json to_json(const ResidualReport& r) {
  return {{"identity", r.identity},
          {"model", to_string(r.model)},
          {"i", r.i + 1},
          {"j", r.j + 1},
          {"points", r.points},
          {"residual", number(r.residual)},
          {"points_doubled", r.points_doubled},
          {"residual_doubled", number(r.residual_doubled)},
          {"convergence_ratio", number(r.convergence_ratio)},
          {"warnings", r.warnings}};
}

inline json to_json(const ScanResult& r) {
  json samples = json::array();
  for (const auto& [x, f] : r.samples) samples.push_back({number(x), number(f)});
  return {{"parameter", r.parameter},
          {"status", r.status()},
          {"argmin", r.interior ? number(r.argmin) : json(nullptr)},
          {"min", r.interior ? number(r.min) : json(nullptr)},
          {"best_sample", {number(r.argmin), number(r.min)}},
          {"tolerance", number(r.tolerance)},
          {"evaluations", r.evaluations},
          {"samples", samples}};
}

inline json to_json(const SphericalRow& r) {
  return {{"sigma", number(r.sigma)},
          {"delta_x1", number(r.delta_x)},
          {"delta_p1", number(r.delta_p)},
          {"canonical_delta_p1", number(r.canonical_delta_p)},
          {"p_perp_squared", number(r.p_perp_squared)},
          {"second_order_rhs", number(r.second_order_rhs)},
          {"bound_function", number(r.bound_function)}};
}

inline json to_json(const SphericalResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  return {{"model", to_string(r.model)},
          {"measure", to_string(r.measure)},
          {"scan", to_json(r.scan)},
          {"at_min", to_json(r.at_min)},
          {"delta_x2_at_min", number(r.delta_x2_at_min)},
          {"delta_x3_at_min", number(r.delta_x3_at_min)},
          {"bound_min", number(r.bound_min)},
          {"rough_estimate", number(r.rough_estimate)},
          {"rows", rows}};
}

inline json to_json(const BoostedResult& r) {
  return {{"model", to_string(r.model)},
          {"measure", to_string(r.measure)},
          {"p1", number(r.p1)},
          {"scan_x1", to_json(r.scan_x1)},
          {"scan_x2", to_json(r.scan_x2)},
          {"ratio", number(r.ratio)},
          {"endpoint", r.endpoint},
          {"p_squared_at_min", number(r.p_squared_at_min)},
          {"estimate_axis1", number(r.estimate_axis1)},
          {"estimate_actual", number(r.estimate_actual)},
          {"estimate_substituted", number(r.estimate_substituted)}};
}

inline json to_json(const RobertsonSummary& s) {
  return {{"model", to_string(s.model)},
          {"measure", to_string(s.measure)},
          {"n_states", s.n_states},
          {"seed", s.seed},
          {"checks", s.checks},
          {"violations", s.violations},
          {"min_slack", number(s.min_slack)},
          {"pure_states", s.pure_states},
          {"max_pure_diagonal_slack", number(s.max_pure_diagonal_slack)},
          {"cap_violations", s.cap_violations},
          {"max_delta_p_over_pmax", number(s.max_delta_p_over_pmax)},
          {"canonical_violations", s.canonical_violations},
          {"max_delta_p_excess", number(s.max_delta_p_excess)},
          {"failures", s.failures},
          {"passed", s.passed()}};
}

/// Minimal CSV table: a fixed header and rows of numbers or strings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<json>& cells) {
    if (cells.size() != header_.size()) throw std::invalid_argument("CSV row has the wrong width");
    rows_.push_back(cells);
  }

  void write(std::ostream& out) const {
    write_line(out, header_);
    for (const auto& row : rows_) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(format(c));
      write_line(out, cells);
    }
  }

  std::string str() const {
    std::ostringstream s;
    write(s);
    return s.str();
  }

 private:
  static std::string format(const json& c) {
    if (c.is_null()) return "";
    if (c.is_string()) {
      const auto v = c.get<std::string>();
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
    return c.dump();  // shortest round-trip representation
  }
  static void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
    out << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<json>> rows_;
};

// Grid states ---------------------------------------------------------------

inline constexpr char kGridMagic[8] = {'G', 'U', 'P', 'G', 'R', 'I', 'D', '1'};

namespace detail {

static_assert(std::endian::native == std::endian::little, "grid files are little-endian");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw std::runtime_error("truncated grid file");
  return v;
}

}  // namespace detail

/// Binary layout: magic "GUPGRID1", uint32 dim, uint32 derivative order,
/// then for each of the 3 axes double min, double max, uint64 count, then
/// the amplitudes as interleaved (re, im) doubles in row-major order (last
/// axis fastest). All little-endian.
inline void write_grid_binary(const GridState& g, std::ostream& out) {
  out.write(kGridMagic, sizeof kGridMagic);
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(g.derivative_order()));
  for (const auto& ax : g.axes().axis) {
    detail::put<double>(out, ax.min);
    detail::put<double>(out, ax.max);
    detail::put<std::uint64_t>(out, static_cast<std::uint64_t>(ax.count));
  }
  for (const auto& v : g.amplitudes()) {
    detail::put<double>(out, v.real());
    detail::put<double>(out, v.imag());
  }
  if (!out) throw std::runtime_error("failed to write grid");
}

inline GridState read_grid_binary(std::istream& in) {
  char magic[sizeof kGridMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kGridMagic, sizeof magic) != 0)
    throw std::runtime_error("not a grid file (bad magic)");
  GridAxes axes;
  axes.dim = static_cast<int>(detail::get<std::uint32_t>(in));
  const int order = static_cast<int>(detail::get<std::uint32_t>(in));
  for (auto& ax : axes.axis) {
    ax.min = detail::get<double>(in);
    ax.max = detail::get<double>(in);
    const auto count = detail::get<std::uint64_t>(in);
    if (count == 0 || count > (1u << 20)) throw std::runtime_error("grid axis count out of range");
    ax.count = static_cast<int>(count);
  }
  axes.validate();
  std::vector<cplx> amps(axes.size());
  for (auto& v : amps) {
    const double re = detail::get<double>(in);
    const double im = detail::get<double>(in);
    v = {re, im};
  }
  return GridState(axes, std::move(amps), order);
}

/// CSV with header p1,p2,p3,re,im, one row per grid point in storage order.
inline void write_grid_csv(const GridState& g, std::ostream& out) {
  CsvTable t({"p1", "p2", "p3", "re", "im"});
  const auto& a = g.amplitudes();
  g.for_each_point([&](std::size_t n, const Vec3& p, double) {
    t.add_row({p[0], p[1], p[2], a[n].real(), a[n].imag()});
  });
  t.write(out);
}

}  // namespace gup
