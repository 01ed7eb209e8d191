#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "vklab/averaging.hpp"
#include "vklab/cli.hpp"
#include "vklab/convergence.hpp"
#include "vklab/profiles.hpp"

using namespace vklab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vklab-test-" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

RunConfig config(const std::string& command, const std::string& name) {
  RunConfig cfg;
  cfg.command = command;
  cfg.out_dir = scratch(name);
  return cfg;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("grid spacing parsing") {
  CHECK(parse_spacing("2/512") == 2.0 / 512);
  CHECK(parse_spacing("0.01") == 0.01);
  CHECK_THROWS_AS(parse_spacing("2/abc"), ConfigError);
  CHECK_THROWS_AS(parse_spacing("-0.1"), ConfigError);
  CHECK_THROWS_AS(parse_spacing("1/0"), ConfigError);
}

TEST_CASE("output directory resolution") {
  CHECK(resolve_out_dir(std::string("here")) == fs::path("here"));
  ::setenv("VKLAB_OUT", "/tmp/from-env", 1);
  CHECK(resolve_out_dir(std::nullopt) == fs::path("/tmp/from-env"));
  ::unsetenv("VKLAB_OUT");
  CHECK(resolve_out_dir(std::nullopt) == fs::path("."));
}

TEST_CASE("run configuration validation") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.grid_j = 1000;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.grid_j = 1024;
  cfg.tol_adm = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tol_adm.reset();
  cfg.levels = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("verify-stationarity") {
  std::ostringstream log;
  SUBCASE("family profile passes") {
    RunConfig cfg = config("verify-stationarity", "stat-family");
    cfg.profile = "family-default";
    CHECK(run_command(cfg, log) == kExitPass);
    const auto j = load_json(cfg.out_dir / "stationarity.json");
    CHECK(j["verdict"] == "PASS");
    CHECK(j["profile"] == "family-default");
    CHECK(j["seed"] == 1);
    CHECK(j["tolerances"]["adm"]["radial"] == 1e-8);
    CHECK(j["variations"].size() == 20);
  }
  SUBCASE("paraboloid passes with a note") {
    RunConfig cfg = config("verify-stationarity", "stat-paraboloid");
    cfg.profile = "paraboloid";
    CHECK(run_command(cfg, log) == kExitPass);
    CHECK(log.str().find("only trivial/harmonic variation classes available") != std::string::npos);
    const auto notes = load_json(cfg.out_dir / "stationarity.json")["notes"];
    CHECK(std::find(notes.begin(), notes.end(), "only trivial/harmonic variation classes available") !=
          notes.end());
  }
  SUBCASE("missing profile file") {
    RunConfig cfg = config("verify-stationarity", "stat-missing");
    cfg.profile = "/nonexistent/profile.csv";
    CHECK(run_command(cfg, log) == kExitConfig);
    CHECK_FALSE(fs::exists(cfg.out_dir / "stationarity.json"));
  }
  SUBCASE("profile CSV input") {
    const fs::path csv = fs::temp_directory_path() / "vklab-test-quartic.csv";
    write_profile_csv(builtin_profile("quartic", RadialGrid::cell_centered(1024)), csv.string());
    RunConfig cfg = config("verify-stationarity", "stat-csv");
    cfg.profile = csv.string();
    cfg.angles = 64;
    cfg.grid_h = 2.0 / 256;
    CHECK(run_command(cfg, log) == kExitPass);
    CHECK(load_json(cfg.out_dir / "stationarity.json")["profile"] == "vklab-test-quartic.csv");
  }
  SUBCASE("a profile violating the origin condition") {
    const fs::path csv = write_file("vklab-test-cone.csv", "t,v,v1,v2\n0.125,0.125,1,0\n0.375,0.375,1,0\n"
                                                          "0.625,0.625,1,0\n0.875,0.875,1,0\n");
    RunConfig cfg = config("verify-stationarity", "stat-cone");
    cfg.profile = csv.string();
    CHECK(run_command(cfg, log) == kExitConfig);
  }
}

TEST_CASE("verify-stationarity reports are byte-identical") {
  std::ostringstream log;
  RunConfig a = config("verify-stationarity", "det-a");
  RunConfig b = config("verify-stationarity", "det-b");
  a.profile = b.profile = "family-default";
  a.seed = b.seed = 99;
  REQUIRE(run_command(a, log) == kExitPass);
  REQUIRE(run_command(b, log) == kExitPass);
  CHECK(slurp(a.out_dir / "stationarity.json") == slurp(b.out_dir / "stationarity.json"));
}

TEST_CASE("averaging identities") {
  SUBCASE("x^2 passes every identity") {
    AveragingConfig cfg;
    cfg.cells = 256;
    cfg.angles = 128;
    cfg.functions = {"x^2"};
    const AveragingReport r = verify_averaging(cfg);
    CHECK(r.verdict);
    CHECK(r.checks.size() == 6);
    CHECK(r.coarse_cells == 128);
    CHECK(r.coarse_angles == 64);
  }
  SUBCASE("three rotations are too few") {
    std::ostringstream log;
    RunConfig cfg = config("verify-averaging", "avg-m3");
    cfg.angles = 3;
    cfg.grid_h = 2.0 / 256;
    CHECK(run_command(cfg, log) == kExitFail);
    const auto j = load_json(cfg.out_dir / "averaging.json");
    CHECK(j["verdict"] == "FAIL");
    CHECK(j["grid"]["fine"]["angles"] == 3);
    CHECK(j["covered_fraction"].get<double>() > 0.85);
  }
  SUBCASE("invalid inputs") {
    AveragingConfig cfg;
    cfg.cells = 255;
    CHECK_THROWS_AS(verify_averaging(cfg), InvalidInput);
  }
}

TEST_CASE("multiplicity command") {
  std::ostringstream log;
  SUBCASE("custom spec with one member") {
    RunConfig cfg = config("multiplicity", "mult-one");
    cfg.config = write_file("vklab-test-one.cfg", "members = 1\n").string();
    cfg.angles = 64;
    cfg.grid_h = 2.0 / 256;
    CHECK(run_command(cfg, log) == kExitPass);
    const auto j = load_json(cfg.out_dir / "multiplicity.json");
    CHECK(j["verdict"] == "PASS");
    CHECK(j["members"].size() == 1);
    CHECK(fs::exists(cfg.out_dir / "member_0.csv"));
    CHECK(fs::exists(cfg.out_dir / "member_1.csv"));
    std::ifstream plot(cfg.out_dir / "family_plot.csv");
    std::string header;
    std::getline(plot, header);
    CHECK(header == "t,v,u_1,k,density");
  }
  SUBCASE("invalid breakpoints") {
    RunConfig cfg = config("multiplicity", "mult-bad");
    cfg.config = write_file("vklab-test-bad.cfg", "sequence = custom\nt = [0.5, 0.4, 0.3]\n").string();
    CHECK(run_command(cfg, log) == kExitConfig);
  }
  SUBCASE("too many members") {
    RunConfig cfg = config("multiplicity", "mult-many");
    cfg.members = 12;
    CHECK(run_command(cfg, log) == kExitConfig);
  }
}

TEST_CASE("convergence") {
  std::ostringstream log;
  SUBCASE("quartic converges at second order") {
    const ConvergenceReport r = run_convergence(builtin_profile("quartic"));
    CHECK(r.verdict);
    for (const auto& c : r.checks) {
      CAPTURE(c.name);
      REQUIRE(c.orders.size() == 2);
      for (double p : c.orders) CHECK(p == doctest::Approx(2.0).epsilon(0.05));
    }
  }
  SUBCASE("paraboloid FD is exact") {
    RunConfig cfg = config("convergence", "conv-paraboloid");
    cfg.profile = "paraboloid";
    CHECK(run_command(cfg, log) == kExitPass);
    const auto j = load_json(cfg.out_dir / "convergence.json");
    for (const auto& c : j["checks"])
      if (c["name"] != "radial-quadrature") CHECK(c["exact"] == true);
  }
  SUBCASE("constant has no error at all") {
    const ConvergenceReport r = run_convergence(builtin_profile("constant"));
    CHECK(r.verdict);
    for (const auto& c : r.checks)
      if (c.name != "radial-quadrature") CHECK(c.errors.back() == 0.0);
  }
  SUBCASE("a single level has no order") {
    RunConfig cfg = config("convergence", "conv-single");
    cfg.profile = "paraboloid";
    cfg.levels = 1;
    CHECK(run_command(cfg, log) == kExitConfig);
    ConvergenceConfig cc;
    cc.levels = 1;
    CHECK_THROWS_AS(run_convergence(builtin_profile("quartic"), cc), InvalidInput);
  }
}

TEST_CASE("unknown command") {
  std::ostringstream log;
  RunConfig cfg;
  cfg.command = "plot";
  CHECK(run_command(cfg, log) == kExitConfig);
}
