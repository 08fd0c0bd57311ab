#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gup/cli.hpp"

using namespace gup;

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run_lab(const std::string& args) {
  const std::string cmd = std::string(GUP_LAB_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gup_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(RunConfig, DefaultsAreValid) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.seed, 12345u);
  EXPECT_EQ(cfg.grid, 64);
}

TEST(RunConfig, RejectsBadValues) {
  auto bad = [](auto mutate) {
    RunConfig cfg;
    mutate(cfg);
    EXPECT_THROW(cfg.validate(), ConfigError);
  };
  bad([](RunConfig& c) { c.hbar = -1; });
  bad([](RunConfig& c) { c.p_max = 0; });
  bad([](RunConfig& c) { c.grid = 48; });
  bad([](RunConfig& c) { c.grid = 512; });
  bad([](RunConfig& c) { c.order = 3; });
  bad([](RunConfig& c) { c.i = 4; });
  bad([](RunConfig& c) { c.sigma.max = c.sigma.min; });
  bad([](RunConfig& c) { c.p1 = -0.5; });
}

TEST(RunConfig, JsonOverlay) {
  RunConfig cfg;
  apply_config_json(cfg, json::parse(R"({"model": "arctan", "pmax": 2.5, "measure": "flat",
                                         "sigma_count": 12, "seed": 7})"));
  EXPECT_EQ(cfg.model, AnsatzKind::ArctanCap);
  EXPECT_EQ(cfg.p_max, 2.5);
  EXPECT_EQ(cfg.measure, MeasureKind::Flat);
  EXPECT_EQ(cfg.sigma.count, 12);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.hbar, 1.0);
  EXPECT_THROW(apply_config_json(cfg, json::parse(R"({"colour": 1})")), ConfigError);
  EXPECT_THROW(apply_config_json(cfg, json::parse(R"({"grid": "big"})")), ConfigError);
  EXPECT_THROW(apply_config_json(cfg, json::parse(R"({"model": "quartic"})")), ConfigError);
  EXPECT_THROW(apply_config_json(cfg, json::parse("[1, 2]")), ConfigError);
}

TEST(RunConfig, MissingConfigFile) {
  RunConfig cfg;
  EXPECT_THROW(load_config_file(cfg, "/nonexistent/gup.json"), ConfigError);
}

TEST(Output, PathFromEnvironment) {
  RunConfig cfg;
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(output_path(cfg, "verify"), "./verify.json");
  ::setenv(kOutputDirEnv, "/tmp/gup-out", 1);
  cfg.format = OutputFormat::Csv;
  EXPECT_EQ(output_path(cfg, "spherical"), "/tmp/gup-out/spherical.csv");
  cfg.output = "x.csv";
  EXPECT_EQ(output_path(cfg, "spherical"), "x.csv");
  ::unsetenv(kOutputDirEnv);
  EXPECT_THROW(write_output("/nonexistent/dir/out.json", "{}"), IoError);
}

TEST(Commands, VerifyReportsAllSuites) {
  RunConfig cfg;
  const auto r = cmd_verify(cfg);
  EXPECT_EQ(r.status, kExitPass);
  const json j = json::parse(r.body);
  EXPECT_EQ(j["condition"].size(), 2u);
  EXPECT_EQ(j["bounds"].size(), 5u);
  EXPECT_EQ(j["kernels"].size(), 4u);
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(Commands, CommutatorTableRows) {
  RunConfig cfg;
  cfg.p_samples = 4;
  cfg.format = OutputFormat::Csv;
  const auto r = cmd_commutator_table(cfg);
  std::istringstream in(r.body);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,exact,paper2nd,taylor2nd,sqrt_bound");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);

  cfg.format = OutputFormat::Json;
  cfg.model = AnsatzKind::Identity;
  const json j = json::parse(cmd_commutator_table(cfg).body);
  EXPECT_EQ(j["rows"].size(), 4u);
  EXPECT_EQ(j["rows"][0]["exact"].get<double>(), 1.0);
}

TEST(Commands, RobertsonDeterministic) {
  RunConfig cfg;
  cfg.n_states = 4;
  const auto a = cmd_robertson(cfg), b = cmd_robertson(cfg);
  EXPECT_EQ(a.body, b.body);
  EXPECT_EQ(a.status, kExitPass);
  cfg.seed = 1;
  EXPECT_NE(cmd_robertson(cfg).body, a.body);
}

TEST(Commands, ScaleCovariance) {
  RunConfig base;
  base.n_states = 3;
  base.sigma = {0.2, 1.0, 5};
  RunConfig scaled = base;
  const double a = 3.0, b = 0.25;
  scaled.hbar *= a;
  scaled.p_max *= b;
  const json r0 = json::parse(cmd_spherical(base).body)["result"];
  const json r1 = json::parse(cmd_spherical(scaled).body)["result"];
  const double dx0 = r0["at_min"]["delta_x1"], dx1 = r1["at_min"]["delta_x1"];
  const double dp0 = r0["at_min"]["delta_p1"], dp1 = r1["at_min"]["delta_p1"];
  EXPECT_NEAR(dx1 / dx0, a / b, 1e-12 * a / b);
  EXPECT_NEAR(dp1 / dp0, b, 1e-12 * b);
}

TEST(Commands, SphericalCsvHeader) {
  RunConfig cfg;
  cfg.sigma = {0.2, 1.0, 4};
  cfg.format = OutputFormat::Csv;
  EXPECT_EQ(first_line(cmd_spherical(cfg).body),
            "sigma,delta_x1,delta_p1,canonical_delta_p1,p_perp_squared,second_order_rhs,bound_function");
}

TEST(Commands, IdentitiesDumpsGrid) {
  RunConfig cfg;
  cfg.grid = 16;
  cfg.model = AnsatzKind::Identity;
  const fs::path path = scratch("psi.bin");
  const auto r = cmd_identities(cfg, path.string());
  const json j = json::parse(r.body);
  EXPECT_EQ(j["reports"].size(), 1u);
  std::ifstream in(path, std::ios::binary);
  const GridState psi = read_grid_binary(in);
  EXPECT_EQ(psi.size(), 16u * 16u * 16u);
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run_lab("verify --output -").code, kExitPass);
  EXPECT_EQ(run_lab("verify --hbar -1 --output -").code, kExitConfig);
  EXPECT_EQ(run_lab("verify --measure sideways --output -").code, kExitConfig);
  EXPECT_EQ(run_lab("nonsense").code, kExitConfig);
  EXPECT_EQ(run_lab("verify --output /nonexistent/dir/v.json").code, kExitIo);
}

TEST(Binary, ConfigFileAndFlagPrecedence) {
  const fs::path cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"model": "arctan", "samples": 3, "format": "csv"})";
  const auto from_file = run_lab("commutator-table --output - --config " + cfg.string());
  EXPECT_EQ(from_file.code, 0);
  int lines = 0;
  for (char c : from_file.out) lines += c == '\n';
  EXPECT_EQ(lines, 4);
  const auto overridden = run_lab("commutator-table --output - --samples 5 --config " + cfg.string());
  lines = 0;
  for (char c : overridden.out) lines += c == '\n';
  EXPECT_EQ(lines, 6);
}

TEST(Binary, WritesToOutputDirectory) {
  const fs::path dir = scratch("outdir");
  fs::create_directories(dir);
  const std::string cmd = "env GUP_LAB_OUTPUT_DIR=" + dir.string() + " " + GUP_LAB_PATH +
                          " commutator-table --samples 2 --format csv > /dev/null 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "commutator-table.csv"));
}
