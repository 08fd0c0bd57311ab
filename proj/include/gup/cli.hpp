#pragma once

// Experiment driver: run configuration, the model-core verification suites
// and one function per subcommand. Each command builds its report in memory
// and writes it once at the end.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gup/analysis.hpp"
#include "gup/io.hpp"
#include "gup/model_core.hpp"
#include "gup/operators.hpp"
#include "gup/states.hpp"

namespace gup {

enum ExitCode : int {
  kExitPass = 0,
  kExitAssertion = 1,
  kExitConfig = 2,
  kExitAccuracy = 3,
  kExitIo = 4,
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Json, Csv };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

inline constexpr const char* kOutputDirEnv = "GUP_LAB_OUTPUT_DIR";

struct RunConfig {
  AnsatzKind model = AnsatzKind::TanhCap;
  double p_max = 1.0;
  double hbar = 1.0;
  MeasureKind measure = MeasureKind::WeightedByInverseG;
  int grid = 64;
  double extent = 8.0;
  int order = 4;
  ScanRange sigma{};  // units of p_M
  std::uint64_t seed = 12345;
  OutputFormat format = OutputFormat::Json;
  std::string output;  // empty: <dir>/<command>.<format>; "-": stdout

  // subcommand parameters
  int i = 1;  // 1-based axes
  int j = 1;
  int p_samples = 10;
  double r_max = 1.0;  // largest |p|/p_M in the commutator table
  double p1 = 1.0;     // units of p_M
  int n_states = 200;

  PhysicalScales scales() const { return {hbar, p_max}; }
  AnsatzModel ansatz() const { return AnsatzModel(model, scales()); }
  Measure make_measure() const {
    return measure == MeasureKind::Flat ? Measure::flat() : Measure::weighted(ansatz());
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (!(hbar > 0.0) || !std::isfinite(hbar)) fail("hbar must be finite and > 0");
    if (!(p_max > 0.0) || !std::isfinite(p_max)) fail("p_max must be finite and > 0");
    if (grid < 16 || grid > 256 || (grid & (grid - 1)) != 0)
      fail("grid resolution must be a power of two between 16 and 256");
    if (!(extent > 0.0) || !std::isfinite(extent)) fail("extent must be finite and > 0");
    if (order != 2 && order != 4) fail("derivative order must be 2 or 4");
    if (!(sigma.min > 0.0) || !(sigma.max > sigma.min) || sigma.count < 3)
      fail("sigma range needs 0 < min < max and at least 3 samples");
    if (i < 1 || i > 3 || j < 1 || j > 3) fail("axes must be 1, 2 or 3");
    if (p_samples < 1) fail("p samples must be >= 1");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) fail("r-max must be finite and > 0");
    if (!(p1 >= 0.0) || !std::isfinite(p1)) fail("p1 must be finite and >= 0");
    if (n_states < 1) fail("states must be >= 1");
  }
};

/// Overlays the keys present in a JSON config object onto cfg. Keys use the
/// long flag names with dashes replaced by underscores.
inline void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  static const std::vector<std::string> known = {
      "model", "pmax", "hbar", "measure", "grid", "extent", "order", "seed", "format", "output",
      "sigma_min", "sigma_max", "sigma_count", "i", "j", "samples", "r_max", "p1", "states"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError("unknown config key '" + key + "'");
      if (key == "model") cfg.model = parse_ansatz_kind(value.get<std::string>());
      else if (key == "pmax") cfg.p_max = value.get<double>();
      else if (key == "hbar") cfg.hbar = value.get<double>();
      else if (key == "measure") {
        const auto m = value.get<std::string>();
        if (m != "flat" && m != "weighted") throw ConfigError("measure must be flat or weighted");
        cfg.measure = m == "flat" ? MeasureKind::Flat : MeasureKind::WeightedByInverseG;
      } else if (key == "grid") cfg.grid = value.get<int>();
      else if (key == "extent") cfg.extent = value.get<double>();
      else if (key == "order") cfg.order = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "format") {
        const auto f = value.get<std::string>();
        if (f != "json" && f != "csv") throw ConfigError("format must be json or csv");
        cfg.format = f == "json" ? OutputFormat::Json : OutputFormat::Csv;
      } else if (key == "output") cfg.output = value.get<std::string>();
      else if (key == "sigma_min") cfg.sigma.min = value.get<double>();
      else if (key == "sigma_max") cfg.sigma.max = value.get<double>();
      else if (key == "sigma_count") cfg.sigma.count = value.get<int>();
      else if (key == "i") cfg.i = value.get<int>();
      else if (key == "j") cfg.j = value.get<int>();
      else if (key == "samples") cfg.p_samples = value.get<int>();
      else if (key == "r_max") cfg.r_max = value.get<double>();
      else if (key == "p1") cfg.p1 = value.get<double>();
      else if (key == "states") cfg.n_states = value.get<int>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  apply_config_json(cfg, j);
}

/// Output of one command: the report in the configured format plus the exit
/// status it implies.
struct CommandResult {
  std::string body;
  int status = kExitPass;
};

inline std::string output_path(const RunConfig& cfg, const std::string& command) {
  if (!cfg.output.empty()) return cfg.output;
  const char* dir = std::getenv(kOutputDirEnv);
  const std::filesystem::path base = dir && *dir ? dir : ".";
  return (base / (command + "." + std::string(to_string(cfg.format)))).string();
}

inline void write_output(const std::string& path, const std::string& body) {
  if (path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << body;
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace detail {

inline json run_header(const RunConfig& cfg, const std::string& command) {
  return {{"command", command},
          {"model", to_string(cfg.model)},
          {"scales", to_json(cfg.scales())},
          {"measure", to_string(cfg.measure)}};
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

// Verification suites -------------------------------------------------------

struct SuiteResult {
  std::string name;
  std::string model;  // empty when not model specific
  int samples = 0;
  double max_violation = 0.0;  // how far the worst sample exceeds the allowed region (<= 0 passes)
  double threshold = 0.0;
  bool passed = true;
};

inline json to_json(const SuiteResult& s) {
  return {{"name", s.name},
          {"model", s.model.empty() ? json(nullptr) : json(s.model)},
          {"samples", s.samples},
          {"max_violation", number(s.max_violation)},
          {"threshold", s.threshold},
          {"passed", s.passed}};
}

inline constexpr double kConditionTolerance = 1e-12;
inline constexpr double kScalarBoundTolerance = 1e-12;

/// Log-spaced points from lo to hi inclusive.
inline std::vector<double> log_points(double lo, double hi, int count) {
  std::vector<double> x(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int k = 0; k < count; ++k) x[k] = k == count - 1 ? hi : lo * std::exp(k * step);
  return x;
}

/// max |G d/dp(pH) - 1| over log-spaced p in [1e-6, 10] p_M.
inline SuiteResult condition_suite(const AnsatzModel& model, int count = 10000) {
  SuiteResult s{"condition_residual", std::string(to_string(model.kind())), count, 0.0,
                kConditionTolerance, true};
  double worst = 0.0;
  for (double r : log_points(1e-6, 10.0, count))
    worst = std::max(worst, std::abs(condition_residual_1d(model, r * model.p_max())));
  s.max_violation = worst;
  s.passed = worst < kConditionTolerance;
  return s;
}

/// Smallest slack of a scalar bound over log-spaced x in [1e-6, 50].
inline SuiteResult scalar_bound_suite(BoundId id, int count = 1000000) {
  SuiteResult s{std::string(to_string(id)), "", count, 0.0, kScalarBoundTolerance, true};
  double min_slack = std::numeric_limits<double>::infinity();
  for (double x : log_points(1e-6, 50.0, count)) min_slack = std::min(min_slack, scalar_bound_check(id, x));
  s.max_violation = -min_slack;
  s.passed = min_slack >= -kScalarBoundTolerance;
  return s;
}

/// Transverse lower-bound chain over |p| in [1e-6, 10] p_M: exact >= the
/// second-order form (tanh), exact >= sqrt form >= 1 (arctan).
inline SuiteResult kernel_lower_bound_suite(const AnsatzModel& model, int count = 10000) {
  SuiteResult s{"kernel_lower_bound", std::string(to_string(model.kind())), count, 0.0,
                kScalarBoundTolerance, true};
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : log_points(1e-6, 10.0, count)) {
    const double p = r * model.p_max();
    const double exact = kernel_coefficients(model, KernelForm::Exact, p)[0];
    if (model.kind() == AnsatzKind::TanhCap) {
      const double second = kernel_coefficients(model, KernelForm::PaperSecondOrder, p)[0];
      worst = std::max(worst, (second - exact) / exact);
    } else {
      const double root = kernel_coefficients(model, KernelForm::SqrtLowerBound, p)[0];
      worst = std::max(worst, std::max((root - exact) / exact, 1.0 - root));
    }
  }
  s.max_violation = worst;
  s.passed = worst <= kScalarBoundTolerance;
  return s;
}

inline constexpr double kTaylorRatio = 16.0;
inline constexpr double kTaylorRatioTolerance = 0.25;

/// Ratio of |exact - Taylor| (transverse part) at r and r/2 for
/// r in {0.3, 0.15, 0.075, 0.0375}; each must be 16 within 25%.
inline SuiteResult kernel_order_suite(const AnsatzModel& model) {
  SuiteResult s{"kernel_taylor_order", std::string(to_string(model.kind())), 0, 0.0,
                kTaylorRatioTolerance, true};
  double worst = 0.0;
  for (double r = 0.3; r > 0.03; r *= 0.5) {
    auto gap = [&](double x) {
      const double p = x * model.p_max();
      return std::abs(kernel_coefficients(model, KernelForm::Exact, p)[0] -
                      kernel_coefficients(model, KernelForm::TaylorSecondOrder, p)[0]);
    };
    const double ratio = gap(r) / gap(0.5 * r);
    worst = std::max(worst, std::abs(ratio / kTaylorRatio - 1.0));
    ++s.samples;
  }
  s.max_violation = worst;
  s.passed = worst <= kTaylorRatioTolerance;
  return s;
}

// Commands ------------------------------------------------------------------

inline CommandResult cmd_verify(const RunConfig& cfg) {
  cfg.validate();
  const auto scales = cfg.scales();
  const AnsatzModel tanh(AnsatzKind::TanhCap, scales), arctan(AnsatzKind::ArctanCap, scales);
  std::vector<SuiteResult> condition = {condition_suite(tanh), condition_suite(arctan)};
  std::vector<SuiteResult> bounds;
  for (BoundId id : kAllBounds) bounds.push_back(scalar_bound_suite(id));
  std::vector<SuiteResult> kernels = {kernel_lower_bound_suite(tanh), kernel_lower_bound_suite(arctan),
                                      kernel_order_suite(tanh), kernel_order_suite(arctan)};
  bool ok = true;
  auto section = [&](const std::vector<SuiteResult>& v) {
    json a = json::array();
    for (const auto& s : v) {
      a.push_back(to_json(s));
      ok = ok && s.passed;
    }
    return a;
  };
  json j = detail::run_header(cfg, "verify");
  j["condition"] = section(condition);
  j["bounds"] = section(bounds);
  j["kernels"] = section(kernels);
  j["passed"] = ok;

  CommandResult r;
  r.status = ok ? kExitPass : kExitAssertion;
  if (cfg.format == OutputFormat::Json) {
    r.body = detail::dump(j);
  } else {
    CsvTable t({"suite", "name", "model", "samples", "max_violation", "threshold", "passed"});
    for (const char* sec : {"condition", "bounds", "kernels"})
      for (const auto& s : j[sec])
        t.add_row({sec, s["name"], s["model"], s["samples"], s["max_violation"], s["threshold"],
                   s["passed"].get<bool>() ? "true" : "false"});
    r.body = t.str();
  }
  return r;
}

/// Kernel forms for [X_i, P_j] with p along axis 1, |p| = k r_max p_M / n.
inline CommandResult cmd_commutator_table(const RunConfig& cfg) {
  cfg.validate();
  const AnsatzModel model = cfg.ansatz();
  const int i = cfg.i - 1, j = cfg.j - 1;
  auto cell = [&](KernelForm form, const Vec3& p) -> json {
    if (!kernel_supported(model.kind(), form)) return nullptr;
    return number(commutator_kernel(model, form, p, i, j));
  };
  std::vector<std::vector<json>> rows;
  for (int k = 1; k <= cfg.p_samples; ++k) {
    const double r = cfg.r_max * k / cfg.p_samples;
    const Vec3 p{r * model.p_max(), 0.0, 0.0};
    rows.push_back({r, cell(KernelForm::Exact, p), cell(KernelForm::PaperSecondOrder, p),
                    cell(KernelForm::TaylorSecondOrder, p), cell(KernelForm::SqrtLowerBound, p)});
  }
  const std::vector<std::string> header = {"r", "exact", "paper2nd", "taylor2nd", "sqrt_bound"};
  CommandResult out;
  if (cfg.format == OutputFormat::Json) {
    json j = detail::run_header(cfg, "commutator-table");
    j["i"] = cfg.i;
    j["j"] = cfg.j;
    j["direction"] = {1, 0, 0};
    json a = json::array();
    for (const auto& row : rows) {
      json o;
      for (std::size_t c = 0; c < header.size(); ++c) o[header[c]] = row[c];
      a.push_back(o);
    }
    j["rows"] = a;
    out.body = detail::dump(j);
  } else {
    CsvTable t(header);
    for (const auto& row : rows) t.add_row(row);
    out.body = t.str();
  }
  return out;
}

inline CommandResult cmd_spherical(const RunConfig& cfg) {
  cfg.validate();
  const auto res = spherical_experiment(cfg.ansatz(), cfg.sigma, cfg.make_measure());
  CommandResult out;
  out.status = res.scan.interior ? kExitPass : kExitAccuracy;
  if (cfg.format == OutputFormat::Json) {
    json j = detail::run_header(cfg, "spherical");
    j["result"] = to_json(res);
    out.body = detail::dump(j);
  } else {
    CsvTable t({"sigma", "delta_x1", "delta_p1", "canonical_delta_p1", "p_perp_squared",
                "second_order_rhs", "bound_function"});
    for (const auto& row : res.rows) {
      const json o = to_json(row);
      std::vector<json> cells;
      for (const auto& [k, v] : o.items()) cells.push_back(v);
      t.add_row(cells);
    }
    out.body = t.str();
  }
  return out;
}

inline CommandResult cmd_boosted(const RunConfig& cfg) {
  cfg.validate();
  const auto res = boosted_experiment(cfg.ansatz(), cfg.p1, cfg.sigma, cfg.make_measure());
  CommandResult out;
  out.status = res.endpoint ? kExitAccuracy : kExitPass;
  if (cfg.format == OutputFormat::Json) {
    json j = detail::run_header(cfg, "boosted");
    j["result"] = to_json(res);
    out.body = detail::dump(j);
  } else {
    CsvTable t({"sigma", "delta_x1", "delta_x2"});
    for (std::size_t k = 0; k < res.scan_x1.samples.size(); ++k)
      t.add_row({number(res.scan_x1.samples[k].first), number(res.scan_x1.samples[k].second),
                 number(res.scan_x2.samples[k].second)});
    out.body = t.str();
  }
  return out;
}

inline CommandResult cmd_robertson(const RunConfig& cfg) {
  cfg.validate();
  const auto sum = robertson_suite(cfg.ansatz(), cfg.n_states, cfg.seed, cfg.make_measure());
  CommandResult out;
  out.status = sum.passed() ? kExitPass : kExitAssertion;
  const json s = to_json(sum);
  if (cfg.format == OutputFormat::Json) {
    json j = detail::run_header(cfg, "robertson");
    j["result"] = s;
    out.body = detail::dump(j);
  } else {
    std::vector<std::string> header;
    std::vector<json> row;
    for (const auto& [k, v] : s.items()) {
      if (k == "failures") continue;
      header.push_back(k);
      row.push_back(v.is_boolean() ? json(v.get<bool>() ? "true" : "false") : v);
    }
    CsvTable t(header);
    t.add_row(row);
    out.body = t.str();
  }
  return out;
}

/// Grid check of [X_i, P_j] and, for i != j, [X_i, X_j] on the isotropic
/// Gaussian of width p_M/2. Optionally dumps the sampled grid state.
inline CommandResult cmd_identities(const RunConfig& cfg, const std::string& dump_grid = {}) {
  cfg.validate();
  const AnsatzModel model = cfg.ansatz();
  const Measure measure = cfg.make_measure();
  const GaussianState g = GaussianState::isotropic(0.5 * model.p_max());
  const GridAxes axes = default_grid_axes(g, cfg.grid, cfg.extent);
  const int i = cfg.i - 1, j = cfg.j - 1;
  std::vector<ResidualReport> reports = {verify_xp_identity(model, g, axes, i, j, cfg.order, measure)};
  if (i != j) reports.push_back(verify_xx_identity(model, g, axes, i, j, cfg.order, measure));
  if (!dump_grid.empty()) {
    const GridState psi = normalize(sample_to_grid(g, axes, cfg.order), Measure::flat());
    std::ofstream f(dump_grid, std::ios::binary);
    if (!f) throw IoError("cannot open '" + dump_grid + "' for writing");
    write_grid_binary(psi, f);
  }
  CommandResult out;
  for (const auto& r : reports)
    if (!r.warnings.empty()) out.status = kExitAccuracy;
  if (cfg.format == OutputFormat::Json) {
    json j = detail::run_header(cfg, "identities");
    j["grid"] = cfg.grid;
    j["extent"] = cfg.extent;
    j["order"] = cfg.order;
    json a = json::array();
    for (const auto& r : reports) a.push_back(to_json(r));
    j["reports"] = a;
    out.body = detail::dump(j);
  } else {
    CsvTable t({"identity", "i", "j", "points", "residual", "points_doubled", "residual_doubled",
                "convergence_ratio", "warnings"});
    for (const auto& r : reports)
      t.add_row({r.identity, r.i + 1, r.j + 1, r.points, number(r.residual), r.points_doubled,
                 number(r.residual_doubled), number(r.convergence_ratio),
                 static_cast<int>(r.warnings.size())});
    out.body = t.str();
  }
  return out;
}

}  // namespace gup
