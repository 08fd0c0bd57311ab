// gup_lab: command-line driver for the uncertainty experiments.

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "gup/cli.hpp"

namespace {

using gup::RunConfig;

// Raw flag values; only the flags actually given override the config file.
struct Flags {
  std::string model, measure, format, output, config, dump_grid;
  double pmax = 0, hbar = 0, extent = 0, sigma_min = 0, sigma_max = 0, r_max = 0, p1 = 0;
  int grid = 0, order = 0, sigma_count = 0, i = 0, j = 0, samples = 0, states = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--model", f.model, "identity|tanh|arctan|kmm-g|kmm-h");
  app.add_option("--pmax", f.pmax, "momentum cap p_M (> 0)");
  app.add_option("--hbar", f.hbar, "hbar (> 0)");
  app.add_option("--measure", f.measure, "flat|weighted");
  app.add_option("--grid", f.grid, "grid points per axis (power of two, 16-256)");
  app.add_option("--extent", f.extent, "grid half-width in state widths");
  app.add_option("--order", f.order, "finite-difference order (2|4)");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--format", f.format, "json|csv");
  app.add_option("--output", f.output, "output file ('-' for stdout)");
  app.add_option("--config", f.config, "JSON config file; flags win");
}

void add_sigma(CLI::App& app, Flags& f) {
  app.add_option("--sigma-min", f.sigma_min, "smallest width, units of p_M");
  app.add_option("--sigma-max", f.sigma_max, "largest width, units of p_M");
  app.add_option("--sigma-count", f.sigma_count, "log-grid samples");
}

RunConfig build_config(const CLI::App& app, const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) gup::load_config_file(cfg, f.config);
  auto given = [&](const char* name) {
    const auto* opt = app.get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  try {
    if (given("--model")) cfg.model = gup::parse_ansatz_kind(f.model);
  } catch (const std::invalid_argument& e) {
    throw gup::ConfigError(e.what());
  }
  if (given("--measure")) {
    if (f.measure != "flat" && f.measure != "weighted")
      throw gup::ConfigError("measure must be flat or weighted");
    cfg.measure = f.measure == "flat" ? gup::MeasureKind::Flat : gup::MeasureKind::WeightedByInverseG;
  }
  if (given("--format")) {
    if (f.format != "json" && f.format != "csv") throw gup::ConfigError("format must be json or csv");
    cfg.format = f.format == "json" ? gup::OutputFormat::Json : gup::OutputFormat::Csv;
  }
  if (given("--pmax")) cfg.p_max = f.pmax;
  if (given("--hbar")) cfg.hbar = f.hbar;
  if (given("--grid")) cfg.grid = f.grid;
  if (given("--extent")) cfg.extent = f.extent;
  if (given("--order")) cfg.order = f.order;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--output")) cfg.output = f.output;
  if (given("--sigma-min")) cfg.sigma.min = f.sigma_min;
  if (given("--sigma-max")) cfg.sigma.max = f.sigma_max;
  if (given("--sigma-count")) cfg.sigma.count = f.sigma_count;
  if (given("--i")) cfg.i = f.i;
  if (given("--j")) cfg.j = f.j;
  if (given("--samples")) cfg.p_samples = f.samples;
  if (given("--r-max")) cfg.r_max = f.r_max;
  if (given("--p1")) cfg.p1 = f.p1;
  if (given("--states")) cfg.n_states = f.states;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized-uncertainty experiments in momentum space"};
  app.require_subcommand(1);
  std::map<std::string, Flags> flags;
  std::map<std::string, std::function<gup::CommandResult(const RunConfig&, const Flags&)>> run;

  auto sub = [&](const char* name, const char* help) -> CLI::App& {
    CLI::App* s = app.add_subcommand(name, help);
    add_common(*s, flags[name]);
    return *s;
  };

  sub("verify", "model-core suites: condition residuals, scalar bounds, kernel checks");
  run["verify"] = [](const RunConfig& c, const Flags&) { return gup::cmd_verify(c); };

  auto& table = sub("commutator-table", "exact and second-order [X_i,P_j] kernels along axis 1");
  table.add_option("--i", flags["commutator-table"].i, "position axis (1-3)");
  table.add_option("--j", flags["commutator-table"].j, "momentum axis (1-3)");
  table.add_option("--samples", flags["commutator-table"].samples, "number of |p| samples");
  table.add_option("--r-max", flags["commutator-table"].r_max, "largest |p|/p_M");
  run["commutator-table"] = [](const RunConfig& c, const Flags&) { return gup::cmd_commutator_table(c); };

  add_sigma(sub("spherical", "Delta X_1 minimized over isotropic Gaussians"), flags["spherical"]);
  run["spherical"] = [](const RunConfig& c, const Flags&) { return gup::cmd_spherical(c); };

  auto& boosted = sub("boosted", "Delta X_1 and Delta X_2 minima for Gaussians centered at (p1,0,0)");
  add_sigma(boosted, flags["boosted"]);
  boosted.add_option("--p1", flags["boosted"].p1, "mean momentum along axis 1, units of p_M");
  run["boosted"] = [](const RunConfig& c, const Flags&) { return gup::cmd_boosted(c); };

  auto& rob = sub("robertson", "Robertson slack on random Gaussian superpositions");
  rob.add_option("--states", flags["robertson"].states, "number of random states");
  run["robertson"] = [](const RunConfig& c, const Flags&) { return gup::cmd_robertson(c); };

  auto& ident = sub("identities", "grid residuals of [X_i,P_j] and [X_i,X_j] with resolution doubling");
  ident.add_option("--i", flags["identities"].i, "first axis (1-3)");
  ident.add_option("--j", flags["identities"].j, "second axis (1-3)");
  ident.add_option("--dump-grid", flags["identities"].dump_grid, "write the sampled grid state (binary)");
  run["identities"] = [](const RunConfig& c, const Flags& f) { return gup::cmd_identities(c, f.dump_grid); };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gup::kExitPass : gup::kExitConfig;
  }

  for (auto* s : app.get_subcommands()) {
    const std::string name = s->get_name();
    try {
      const RunConfig cfg = build_config(*s, flags[name]);
      const gup::CommandResult result = run[name](cfg, flags[name]);
      gup::write_output(gup::output_path(cfg, name), result.body);
      return result.status;
    } catch (const gup::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return gup::kExitConfig;
    } catch (const gup::IoError& e) {
      std::cerr << "i/o error: " << e.what() << '\n';
      return gup::kExitIo;
    } catch (const gup::AccuracyError& e) {
      std::cerr << "accuracy failure: " << e.what() << '\n';
      return gup::kExitAccuracy;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return gup::kExitAssertion;
    }
  }
  return gup::kExitConfig;
}
