#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sectorkit/error.hpp"
#include "sectorkit/scenario.hpp"

using namespace sectorkit;
namespace fs = std::filesystem;

namespace {

json small_scenario() {
  return json::parse(R"({
    "name": "small-chain", "seed": 3,
    "family": {"model": "SliceBall", "dim": 1, "box": [-2, 2], "collar": "1",
               "layers": [{"cells": 0, "radius": "0"}, {"cells": 1, "radius": "3/5"}]},
    "net": {"model": "Full"},
    "cocycles": [{"name": "X", "charge": "boson"}],
    "samples": {"homotopy_pairs": 10, "path_covariance": 10, "path_pairs": 4, "probe_pairs": 4},
    "expect": {"axioms": {"K2": "holds", "K6": "fails"}, "cocycles": {"X": "holds"}}
  })");
}

std::string pointer_of(const json& config) {
  try {
    parse_scenario(config);
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::ConfigInvalid);
    std::string w = e.what();
    auto at = w.find(": /");
    REQUIRE(at != std::string::npos);
    return w.substr(at + 2, w.find(": ", at + 2) - at - 2);
  }
  FAIL("accepted");
  return "";
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("sectorkit-test-" + std::to_string(::getpid())) / name;
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SECTORKIT_CLI) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write_config(const fs::path& dir, const json& j) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("config errors carry the path of the offending entry") {
  json c = small_scenario();
  CHECK_NOTHROW(parse_scenario(c));

  json bad = c;
  bad["colour"] = 1;
  CHECK(pointer_of(bad) == "/colour");
  bad = c;
  bad.erase("seed");
  CHECK(pointer_of(bad) == "/seed");
  bad = c;
  bad["net"]["model"] = "Majorana";
  CHECK(pointer_of(bad) == "/net/model");
  bad = c;
  bad["cocycles"][0]["charge"] = "anyon";
  CHECK(pointer_of(bad) == "/cocycles/0/charge");
  bad = c;
  bad["cocycles"].push_back({{"name", "X"}, {"charge", "boson"}});
  CHECK(pointer_of(bad) == "/cocycles/1/name");
  bad = c;
  bad["samples"]["path_covariance"] = -1;
  CHECK(pointer_of(bad) == "/samples/path_covariance");
  bad = c;
  bad["budgets"] = {{"homotopy", 0}};
  CHECK(pointer_of(bad) == "/budgets/homotopy");
  bad = c;
  bad["expect"]["axioms"]["K6"] = "maybe";
  CHECK(pointer_of(bad) == "/expect/axioms/K6");
  bad = c;
  bad["net"]["box"] = {3};
  CHECK(pointer_of(bad) == "/net/box");
  bad = c;
  bad.erase("net");
  CHECK(pointer_of(bad) == "/net");
  CHECK_THROWS_AS(parse_subcommand("everything"), Error);
}

TEST_CASE("bad families are reported as config errors") {
  json c = small_scenario();
  c["family"]["model"] = "Torus";
  try {
    run_scenario(parse_scenario(c), Subcommand::PosetCheck);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind == ErrorKind::ConfigInvalid);
  }
}

TEST_CASE("expectations decide the exit code") {
  Scenario sc = parse_scenario(small_scenario());
  RunResult r = run_scenario(sc, Subcommand::CocycleVerify);
  CHECK(r.exit_code == 0);
  CHECK(r.report["schema"] == kReportSchema);
  CHECK(r.summary.find("small-chain") != std::string::npos);

  json wrong = small_scenario();
  wrong["expect"]["axioms"]["K6"] = "holds";
  RunResult m = run_scenario(parse_scenario(wrong), Subcommand::PosetCheck);
  CHECK(m.exit_code == 1);
}

TEST_CASE("reports are deterministic") {
  Scenario sc = parse_scenario(small_scenario());
  RunResult a = run_scenario(sc, Subcommand::All), b = run_scenario(sc, Subcommand::All);
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.summary == b.summary);
  fs::path d1 = scratch("det1"), d2 = scratch("det2");
  write_outputs(a, d1.string());
  write_outputs(b, d2.string());
  CHECK(slurp(d1 / "report.json") == slurp(d2 / "report.json"));
  CHECK(slurp(d1 / "summary.txt") == slurp(d2 / "summary.txt"));
}

TEST_CASE("command line exit codes") {
  fs::path d = scratch("cli");
  fs::path cfg = write_config(d, small_scenario());
  std::string out = " --out " + (d / "out").string();
  CHECK(run_cli("poset-check --config " + cfg.string() + out) == 0);
  CHECK(fs::exists(d / "out" / "report.json"));
  CHECK(fs::exists(d / "out" / "summary.txt"));

  json wrong = small_scenario();
  wrong["expect"]["axioms"]["K6"] = "holds";
  fs::path wd = scratch("cli-wrong");
  CHECK(run_cli("poset-check --config " + write_config(wd, wrong).string() + out) == 1);

  json broken = small_scenario();
  broken["samples"]["path_covariance"] = "many";
  fs::path bd = scratch("cli-broken");
  CHECK(run_cli("poset-check --config " + write_config(bd, broken).string() + out) == 2);
  CHECK(run_cli("poset-check --config " + (d / "missing.json").string() + out) == 2);
  CHECK(run_cli("poset-check" + out) == 2);
  CHECK(run_cli("juggle --config " + cfg.string()) == 2);
  CHECK(run_cli("poset-check --jobs 0 --config " + cfg.string()) == 2);
  {
    std::ofstream(d / "garbage.json") << "{ not json";
  }
  CHECK(run_cli("poset-check --config " + (d / "garbage.json").string() + out) == 2);
  // an output directory below a regular file cannot be created
  CHECK(run_cli("poset-check --config " + cfg.string() + " --out " + (cfg / "x").string()) == 3);

  fs::remove_all(d.parent_path());
}
