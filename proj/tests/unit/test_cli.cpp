// Copyright (c) 2026 The vortexlab authors
// SPDX-License-Identifier: MIT

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace vcli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "vortexlab_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

std::string error_of(const std::string& command, const std::map<std::string, std::string>& flags,
                     const std::optional<std::string>& file = std::nullopt) {
  try {
    parse_config(command, file, flags);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("solve defaults") {
  RunConfig c = parse_config("solve", std::nullopt, {});
  CHECK(c.real("L") == 12.0);
  CHECK(c.real("h") == 0.1);
  CHECK(c.real("mu") == 5.0);
  CHECK(c.real("tol") == 1e-10);
  CHECK(c.source.at("mu") == "default");
  RunConfig two = parse_config("solve", std::nullopt, {{"centers", "1,0;-1,0"}});
  CHECK(two.real("mu") == 9.0);
}

TEST_CASE("every command has a schema with the common keys") {
  for (const auto& name : command_names()) {
    const auto& keys = schema(name);
    for (const char* k : {"out", "jobs", "seed", "emit_plots"})
      CHECK(std::any_of(keys.begin(), keys.end(), [&](const KeySpec& s) { return s.key == k; }));
  }
  CHECK(command_names().size() == 12);
}

TEST_CASE("validation errors name the key") {
  std::string e = error_of("solve", {{"mu", "3"}});
  CHECK(e.find("'mu'") != std::string::npos);
  CHECK(e.find("mu > 4N") != std::string::npos);
  CHECK(error_of("solve", {{"bogus", "1"}}).find("'bogus'") != std::string::npos);
  CHECK(error_of("solve", {{"L", "twelve"}}).find("'L'") != std::string::npos);
  CHECK(error_of("solve", {{"max_iterations", "1.5"}}).find("'max_iterations'") != std::string::npos);
  CHECK(error_of("solve", {{"centers", "0,0;11,0"}}).find("'centers'") != std::string::npos);
  CHECK(error_of("solve", {{"h", "0.07"}}).find("'h'") != std::string::npos);
  CHECK(error_of("evolve2d", {{"velocities", "1"}}).find("'velocities'") != std::string::npos);
  CHECK(error_of("geodesic", {}).find("'metric'") != std::string::npos);
  CHECK(error_of("metric", {{"r", "1,0.5"}}).find("'r'") != std::string::npos);
  CHECK(error_of("hamiltonian", {{"metric", VTX_TEST_DATA_DIR "/reduced_metric_h0.1.csv"}, {"l", "0"}})
            .find("'l'") != std::string::npos);
}

TEST_CASE("file values, sections and flag precedence") {
  fs::path d = scratch("toml");
  std::ofstream(d / "run.toml") << "L = 6\nh = 0.2\n[solve]\ncenters = [[1.0, 0.0], [-1.0, 0.0]]\ntol = 1e-9\n"
                                << "[modes]\nrelax = false\n";
  RunConfig c = parse_config("solve", (d / "run.toml").string(), {{"tol", "1e-8"}});
  CHECK(c.real("L") == 6.0);
  CHECK(c.source.at("L") == "file");
  CHECK(c.centers("centers").size() == 2);
  CHECK(c.real("tol") == 1e-8);
  CHECK(c.source.at("tol") == "flag");
  CHECK(c.real("mu") == 9.0);

  std::ofstream(d / "bad.toml") << "L = 6\nextra = 2\n";
  CHECK(error_of("solve", {}, (d / "bad.toml").string()).find("'extra'") != std::string::npos);
  std::ofstream(d / "type.toml") << "centers = 3\n";
  CHECK(error_of("solve", {}, (d / "type.toml").string()).find("'centers'") != std::string::npos);
  CHECK(error_of("solve", {}, (d / "missing.toml").string()).find("'config'") != std::string::npos);
}

TEST_CASE("solve run: artifacts, manifest and exit codes") {
  fs::path d = scratch("solve");
  std::string out = (d / "a").string();
  int code = run_cli({"solve", "--centers", "0,0", "--L", "6", "--h", "0.2", "--out", out});
  REQUIRE(code == 0);
  for (const char* f : {"solve.csv", "solve.vxf", "manifest.json"}) CHECK(fs::exists(d / "a" / f));
  auto m = manifest(d / "a");
  CHECK(m["status"] == "ok");
  CHECK(m["config"]["L"]["source"] == "flag");
  CHECK(m["config"]["tol"]["source"] == "default");
  CHECK(m["files"].size() == 2);
  for (const auto& f : m["files"]) CHECK(f["sha256"] == sha256_file(d / "a" / f["path"].get<std::string>()));
  CHECK_FALSE(fs::exists(d / "a" / "manifest.json.tmp"));
  std::string csv = slurp(d / "a" / "solve.csv");
  CHECK(csv.rfind("# vortexlab " + std::string(kVersion) + " command=solve config_sha256=", 0) == 0);
  CHECK(csv.find(m["config_sha256"].get<std::string>()) != std::string::npos);

  SUBCASE("reruns are byte-identical") {
    std::string out2 = (d / "b").string();
    REQUIRE(run_cli({"solve", "--centers", "0,0", "--L", "6", "--h", "0.2", "--out", out2}) == 0);
    CHECK(slurp(d / "a" / "solve.csv") == slurp(d / "b" / "solve.csv"));
    CHECK(slurp(d / "a" / "solve.vxf") == slurp(d / "b" / "solve.vxf"));
  }
  SUBCASE("non-convergence exits 1 with a partial report") {
    std::string o = (d / "c").string();
    CHECK(run_cli({"solve", "--L", "6", "--h", "0.2", "--max-iterations", "1", "--out", o}) == 1);
    auto mc = manifest(d / "c");
    CHECK(mc["status"] == "not_converged");
    CHECK(slurp(d / "c" / "solve.csv").find("\n1,6,") != std::string::npos);
  }
  SUBCASE("validation errors exit 2 before any compute") {
    std::string o = (d / "e").string();
    CHECK(run_cli({"solve", "--mu", "3", "--out", o}) == 2);
    CHECK_FALSE(fs::exists(d / "e"));
    CHECK(run_cli({"solve", "--unknown", "1"}) == 2);
    CHECK(run_cli({"nonsense"}) == 2);
  }
  SUBCASE("report merges the results directory") {
    std::string o = (d / "report").string();
    REQUIRE(run_cli({"report", "--dir", d.string(), "--out", o}) == 0);
    std::string r = slurp(d / "report" / "report.csv");
    CHECK(r.find("source,config_sha256,row,column,value") != std::string::npos);
    CHECK(r.find("a/solve.csv," + m["config_sha256"].get<std::string>() + ",0,energy,") != std::string::npos);
    CHECK(fs::exists(d / "report" / "plot_0.gp"));
    CHECK(manifest(d / "report")["files"].size() >= 2);
  }
}

TEST_CASE("invariant violations exit 3 and keep the last good state") {
  fs::path d = scratch("evolve");
  std::string o = (d / "x").string();
  CHECK(run_cli({"evolve2d", "--L", "6", "--h", "0.2", "--velocities", "1,0", "--epsilon", "1000", "--t-end", "2",
                 "--out", o}) == 3);
  CHECK(manifest(d / "x")["status"] == "invariant_violation");
  CHECK(fs::exists(d / "x" / "last_good.vxf"));
}

TEST_CASE("reduced-model commands and plot scripts") {
  fs::path d = scratch("reduced");
  std::string metric = VTX_TEST_DATA_DIR "/reduced_metric_h0.1.csv";
  REQUIRE(run_cli({"geodesic", "--metric", metric, "--tau-span", "1", "--emit-plots", "--out", (d / "g").string()}) ==
          0);
  CHECK(fs::exists(d / "g" / "trajectory.csv"));
  std::string gp = slurp(d / "g" / "trajectory.gp");
  CHECK(gp.find("'trajectory.csv'") != std::string::npos);
  REQUIRE(run_cli({"wavemap", "--metric", metric, "--tau-span", "0.2", "--out", (d / "w").string()}) == 0);
  CHECK(manifest(d / "w")["files"].size() == 2);
}

TEST_CASE("jobs are capped by VORTEX_THREADS") {
  RunConfig c = parse_config("metric", std::nullopt, {{"jobs", "8"}, {"out", scratch("jobs").string()}});
  Run run(c);
  setenv("VORTEX_THREADS", "2", 1);
  CHECK(run.jobs() == 2);
  unsetenv("VORTEX_THREADS");
  CHECK(run.jobs() == 8);
}
