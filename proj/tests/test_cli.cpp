#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gibbs/cli.hpp"

using namespace gibbs;
using namespace gibbs::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("gibbsgeo_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_main(std::vector<std::string> args) {
  args.insert(args.begin(), "gibbsgeo");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config hash") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  json a = preset("figure-1");
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) == config_hash(preset("figure-1")));
  json b = a;
  b["seed"] = 7;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("presets and overrides") {
  for (const char* p : {"figure-1", "figure-2", "mama", "bernoulli"}) CHECK(preset(p).is_object());
  CHECK_THROWS_AS(preset("figure-3"), ConfigError);
  Invocation inv;
  inv.command = "divergence";
  inv.preset = "mama";
  inv.depth = 6;
  inv.seed = 11;
  json cfg = effective_config(inv);
  CHECK(cfg["depth"] == 6);
  CHECK(cfg["seed"] == 11);
  inv.command = "geodesic";
  CHECK_THROWS_AS(effective_config(inv), ConfigError);
  inv.preset.reset();
  CHECK_THROWS_AS(effective_config(inv), ConfigError);
}

TEST_CASE("config validation") {
  json g = preset("figure-1");
  json bad = g;
  bad["colour"] = "red";
  CHECK_THROWS_AS(parse_geodesic(bad), ConfigError);
  bad = g;
  bad["directions"] = json::array();
  CHECK_THROWS_AS(parse_geodesic(bad), ConfigError);
  bad = g;
  bad["origin"] = {1.2, 0.5};
  CHECK_THROWS_AS(parse_geodesic(bad), ConfigError);
  bad = g;
  bad["chart_bound"] = 0.3;
  CHECK_THROWS_AS(parse_geodesic(bad), ConfigError);
  bad = g;
  bad["integrator"] = "euler";
  CHECK_THROWS_AS(parse_geodesic(bad), ConfigError);
  bad = g;
  bad["step"] = -1;
  CHECK_THROWS_AS(parse_geodesic(bad), ConfigError);
  GeodesicJob job = parse_geodesic(g);
  CHECK(job.angles.size() == 16);
  CHECK(job.r == 0.5);

  json d = preset("mama");
  d["matrices"][0] = {{0.5, 0.6}, {0.5, 0.5}};
  CHECK_THROWS_AS(parse_divergence(d), ConfigError);
  d = preset("mama");
  d["matrices"].erase(2);
  CHECK_THROWS_AS(parse_divergence(d), ConfigError);

  json b = {{"command", "basis"}, {"kind", "maxent-beta"}, {"n_max", 11}};
  CHECK_THROWS_AS(parse_basis(b), ConfigError);
  b["n_max"] = 3;
  b["kind"] = "nope";
  CHECK_THROWS_AS(parse_basis(b), ConfigError);

  json p = {{"command", "project"}, {"vertices", {json(preset("mama")["matrices"][0])}}, {"target", preset("mama")["matrices"][1]}};
  CHECK_THROWS_AS(parse_project(p), ConfigError);
}

TEST_CASE("jacobian parsing") {
  Potential a = parse_jacobian(json{{0.3, 0.7}, {0.4, 0.6}}, "m");
  CHECK(a.is_normalized());
  CHECK(a.depth() == 2);
  Potential b = parse_jacobian(json{{"depth", 1}, {"values", {0.2, -0.4}}}, "p");
  CHECK(normalization_residual(b.function()) < 1e-12);
  CHECK_THROWS_AS(parse_jacobian(json{{"depth", 1}}, "p"), ConfigError);
}

TEST_CASE("geodesic runs are reproducible") {
  fs::path d1 = scratch("geo1"), d2 = scratch("geo2");
  RunResult a = run_geodesic(preset("figure-2"), d1.string());
  RunResult b = run_geodesic(preset("figure-2"), d2.string());
  CHECK(a.exit_code == kExitOk);
  CHECK(a.files.size() == 17);
  CHECK(a.report["checks"]["non_straight"] == true);
  for (const auto& f : a.files) {
    fs::path name = fs::path(f).filename();
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  }
  std::string csv = slurp(d1 / "geodesic_00.csv");
  CHECK(csv.rfind("t,r,s,dr,ds,energy\n", 0) == 0);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("divergence, basis and project runs") {
  fs::path d = scratch("misc");
  RunResult m = run_divergence(preset("mama"), d.string());
  CHECK(m.exit_code == kExitNumerical);
  CHECK(m.report["status"] == "oracle_mismatch");
  CHECK(std::abs(m.report["results"]["pythagorean"]["type1"].get<double>() + 0.35782) < 1e-5);

  RunResult b =
      run_basis(json{{"command", "basis"}, {"kind", "markov-gamma"}, {"matrix", {{0.3, 0.7}, {0.4, 0.6}}}}, d.string());
  CHECK(b.exit_code == kExitOk);
  CHECK(fs::exists(d / "basis_markov-gamma.csv"));

  json mats = preset("mama")["matrices"];
  RunResult p = run_project(
      json{{"command", "project"}, {"vertices", mats}, {"target", mats[1]}, {"mode", "min"}}, d.string());
  CHECK(p.exit_code == kExitOk);
  CHECK(std::abs(p.report["results"]["value"].get<double>()) < 1e-9);
  fs::remove_all(d);
}

TEST_CASE("command line") {
  fs::path d = scratch("main");
  CHECK(run_main({"geodesic", "--preset", "nope", "--out", d.string()}) == kExitConfig);
  CHECK(run_main({"geodesic", "--preset", "figure-1", "--depth", "4", "--out", d.string()}) == kExitConfig);
  CHECK(run_main({"frobnicate"}) == kExitConfig);
  CHECK(run_main({"basis", "--config", (d / "missing.json").string()}) == kExitConfig);
  CHECK_FALSE(fs::exists(d / "geodesic_report.json"));
  fs::create_directories(d);
  std::ofstream(d / "b.json") << R"({"command": "basis", "kind": "maxent-beta", "n_max": 3})";
  CHECK(run_main({"basis", "--config", (d / "b.json").string(), "--out", d.string()}) == kExitOk);
  CHECK(fs::exists(d / "basis_report.json"));
  fs::remove_all(d);
}
