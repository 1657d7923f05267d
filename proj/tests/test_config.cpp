#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "certmenu/runner.hpp"
#include "certmenu/solver.hpp"

using namespace certmenu;
namespace fs = std::filesystem;

namespace {

const char* kMinimal =
    "model.gamma = 0.25\n"
    "attention.family = power\n"
    "cost.kappa = 1.0\n"
    "cost.sigma = 2.0\n"
    "dist.family = uniform\n"
    "dist.theta_max = 1.0\n";

void expect_error(const std::string& text, const std::string& needle) {
  try {
    parse_config(text);
    FAIL_CHECK("no error for config with expected failure '" << needle
                                                             << "'");
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    CAPTURE(what);
    CAPTURE(needle);
    CHECK(what.find(needle) != std::string::npos);
  }
}

fs::path test_dir() {
  fs::path dir = fs::temp_directory_path() / "certmenu_config_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  fs::path p = test_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

// The fast-solving model used for the CLI round trips.
std::string cli_config(int seed = 12345) {
  std::ostringstream cfg;
  cfg << kMinimal << "grid.theta_points = 401\n"
      << "output.precision = 12\n"
      << "seed = " << seed << "\n";
  return cfg.str();
}

}  // namespace

TEST_CASE("parse_config: defaults and overrides") {
  RunConfig rc = parse_config(kMinimal);
  CHECK(rc.model.gamma == 0.25);
  CHECK(rc.model.attention.alpha == 1.0);
  CHECK(rc.model.attention.loss_b == 0.0);
  CHECK(rc.model.attention.addiction_z == 0.0);
  CHECK(rc.model.cost.kappa == 1.0);
  CHECK(rc.model.cost.sigma == 2.0);
  CHECK(rc.model.dist.upper() == 1.0);
  CHECK(rc.model.grid.theta_points == 2001);
  CHECK(rc.model.grid.lambda_coarse_points == 64);
  CHECK(rc.output.dir == ".");
  CHECK(rc.output.precision == 12);
  CHECK(rc.seed == 12345);

  RunConfig full = parse_config(
      "# full example, with comments and ragged spacing\n"
      "\n"
      "model.gamma=0.1\n"
      "attention.family   =   power\n"
      "attention.alpha = 0.5   # inline values are plain numbers\n"
      "attention.loss_b = 0.0\n"
      "cost.kappa = 2.0\n"
      "cost.sigma = 3.0\n"
      "dist.family = uniform\n"
      "dist.theta_max = 2.0\n"
      "grid.theta_points = 801\n"
      "grid.lambda_coarse_points = 96\n"
      "grid.refine_tol = 1e-9\n"
      "output.dir = out\n"
      "output.precision = 6\n"
      "seed = 7\n");
  CHECK(full.model.gamma == 0.1);
  CHECK(full.model.attention.alpha == 0.5);
  CHECK(full.model.cost.kappa == 2.0);
  CHECK(full.model.cost.sigma == 3.0);
  CHECK(full.model.dist.upper() == 2.0);
  CHECK(full.model.grid.theta_points == 801);
  CHECK(full.model.grid.lambda_coarse_points == 96);
  CHECK(full.model.grid.refine_tol == 1e-9);
  CHECK(full.output.dir == "out");
  CHECK(full.output.precision == 6);
  CHECK(full.seed == 7);
}

TEST_CASE("parse_config: every failure names its key") {
  expect_error("attention.family = power\ncost.kappa = 1\ncost.sigma = 2\n"
               "dist.family = uniform\ndist.theta_max = 1\n",
               "missing config key 'model.gamma'");
  expect_error(std::string(kMinimal) + "model.gama = 0.1\n",
               "unknown config key 'model.gama'");
  expect_error(std::string(kMinimal) + "model.gamma = 0.3\n",
               "duplicate config key 'model.gamma'");
  expect_error("model.gamma = abc\nattention.family = power\ncost.kappa = 1\n"
               "cost.sigma = 2\ndist.family = uniform\ndist.theta_max = 1\n",
               "must be a number");
  expect_error(std::string(kMinimal) + "grid.theta_points = 10.5\n",
               "must be an integer");
  expect_error(std::string(kMinimal) + "grid.theta_points = 801x\n",
               "must be an integer");
  expect_error("attention.family = exp\nmodel.gamma = 0.25\ncost.kappa = 1\n"
               "cost.sigma = 2\ndist.family = uniform\ndist.theta_max = 1\n",
               "attention.family must be 'power'");
  expect_error("dist.family = normal\nmodel.gamma = 0.25\ncost.kappa = 1\n"
               "cost.sigma = 2\nattention.family = power\ndist.theta_max = 1\n",
               "dist.family must be 'uniform'");
  expect_error(std::string(kMinimal) + "output.precision = 18\n",
               "output.precision must be in [0, 17]");
  expect_error(std::string(kMinimal) + "seed = -1\n", "seed must be >= 0");
  expect_error(std::string(kMinimal) + "stray line\n", "not 'key = value'");
  expect_error(std::string(kMinimal) + "output.dir =\n",
               "empty key or value");

  // Model-level validation failures surface through the same channel.
  expect_error("model.gamma = -1\nattention.family = power\ncost.kappa = 1\n"
               "cost.sigma = 2\ndist.family = uniform\ndist.theta_max = 1\n",
               "model.gamma must be positive");
  expect_error(std::string(kMinimal) + "attention.loss_b = 0.5\n"
                                       "attention.addiction_z = 0.1\n",
               "mutually exclusive");
}

TEST_CASE("load_config: missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/certmenu.cfg"),
                  std::invalid_argument);
}

TEST_CASE("format_fixed: locale-independent fixed decimals") {
  CHECK(format_fixed(0.25, 3) == "0.250");
  CHECK(format_fixed(1.23456, 2) == "1.23");
  CHECK(format_fixed(2.0, 0) == "2");
  CHECK(format_fixed(-0.5, 1) == "-0.5");
  CHECK(format_fixed(0.140625, 12) == "0.140625000000");
}

TEST_CASE("run_command: usage and config errors exit 2") {
  CHECK(run_command({}) == 2);
  CHECK(run_command({"frobnicate"}) == 2);
  CHECK(run_command({"solve"}) == 2);  // --config is required
  CHECK(run_command({"solve", "--config", "/nonexistent/x.cfg"}) == 2);
  CHECK(run_command({"solve", "--config"}) == 2);  // dangling option
  std::string bad = write_file("bad.cfg", "model.gamma = oops\n");
  CHECK(run_command({"solve", "--config", bad}) == 2);
  std::string good = write_file("good.cfg", cli_config());
  CHECK(run_command({"benchmark", "--config", good}) == 2);  // kind missing
  CHECK(run_command({"verify", "--config", good, "--probes", "0"}) == 2);
}

TEST_CASE("run_command: solve writes the documented mechanism table") {
  std::string cfg = write_file("solve.cfg", cli_config());
  fs::path out = test_dir() / "solve_out";
  REQUIRE(run_command({"solve", "--config", cfg, "--out", out.string()}) == 0);
  std::string csv = slurp(out / "mechanism.csv");
  CHECK(first_line(csv) ==
        "theta,phi,lambda,v_good,v_bad,price,attention,engagement_density");
  // 401 uniform nodes plus the inserted serving boundary.
  long rows = static_cast<long>(std::count(csv.begin(), csv.end(), '\n')) - 1;
  CHECK(rows >= 401);
  CHECK(rows <= 403);
}

TEST_CASE("run_command: benchmarks, sweeps, figures, compare, limits") {
  std::string cfg = write_file("all.cfg", cli_config());
  fs::path out = test_dir() / "all_out";
  std::string o = out.string();
  CHECK(run_command({"benchmark", "planner", "--config", cfg, "--out", o}) ==
        0);
  CHECK(run_command({"benchmark", "single", "--lambda", "0.5", "--config",
                     cfg, "--out", o}) == 0);
  CHECK(run_command({"benchmark", "two-cert", "--config", cfg, "--out", o}) ==
        0);
  CHECK(run_command({"benchmark", "perfect", "--config", cfg, "--out", o}) ==
        0);
  CHECK(run_command({"sweep", "gamma", "--values", "0.1,0.25,0.4", "--config",
                     cfg, "--out", o}) == 0);
  CHECK(run_command({"compare-perfect", "--config", cfg, "--out", o}) == 0);
  CHECK(run_command({"limits", "--gammas", "1e-2,1e-3", "--phis", "0.0,0.3",
                     "--config", cfg, "--out", o}) == 0);
  CHECK(run_command({"figures", "--config", cfg, "--out", o}) == 0);
  for (const char* name :
       {"benchmark_planner.csv", "benchmark_single.csv",
        "benchmark_two_cert.csv", "benchmark_perfect.csv", "sweep_gamma.csv",
        "compare.csv", "limits.csv", "fig1.csv", "fig2a.csv", "fig2b.csv",
        "fig3.csv"})
    CHECK(fs::exists(out / name));
  CHECK(first_line(slurp(out / "sweep_gamma.csv")) ==
        "value,profit,engagement,welfare,diversity,quality_min_served,"
        "quality_max");
  CHECK(first_line(slurp(out / "limits.csv")) ==
        "gamma,phi,quality,views,engagement");
}

TEST_CASE("run_command: output is deterministic across runs") {
  std::string cfg = write_file("det.cfg", cli_config(777));
  fs::path a = test_dir() / "det_a";
  fs::path b = test_dir() / "det_b";
  REQUIRE(run_command({"figures", "--config", cfg, "--out", a.string()}) == 0);
  REQUIRE(run_command({"figures", "--config", cfg, "--out", b.string()}) == 0);
  for (const char* name : {"fig1.csv", "fig2a.csv", "fig2b.csv", "fig3.csv"})
    CHECK(slurp(a / name) == slurp(b / name));
}

TEST_CASE("run_command: verify passes on the reference model") {
  std::string cfg = write_file("verify.cfg", cli_config());
  CHECK(run_command({"verify", "--config", cfg, "--probes", "5"}) == 0);
}
