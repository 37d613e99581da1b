#pragma once

#include <string>
#include <vector>

#include "sectorkit/morphisms.hpp"

namespace sectorkit {

inline constexpr const char* kReportSchema = "sectorkit-report/1";

enum class Subcommand { PosetCheck, NetCheck, CocycleVerify, Statistics, FunctorRoundtrip, All };
const char* to_string(Subcommand s);
Subcommand parse_subcommand(const std::string& s);  // ConfigInvalid

struct CocycleSpec {
  std::string name;
  Charge charge = Charge::Boson;
  std::string character = "trivial";
};

struct Scenario {
  std::string name;
  uint64_t seed = 0;
  json family;                  // region-family parameters
  bool has_net = false;
  NetModel model = NetModel::Full;
  long box_lo = 0, box_hi = 0;
  std::vector<CocycleSpec> cocycles;
  int homotopy_pairs = 60, covariance_samples = 60, path_pairs = 10, probe_pairs = 8;
  long budget_homotopy = 2000, budget_cosets = 1000000;
  std::string pole, other_pole;  // element ids, empty: defaults
  bool morphism_laws = false;
  bool conclusive = false;       // unknown verdicts count as mismatches
  json expect = json::object();
};

// ConfigInvalid with the JSON pointer of the first offending entry.
Scenario parse_scenario(const json& config);

struct RunOptions {
  int jobs = 1;
  long budget_homotopy = -1, budget_cosets = -1;  // -1: keep the config value
  bool h1_all_supports = false;  // also report H1 over all supports
};

struct RunResult {
  json report;
  std::string summary;
  int exit_code = 0;  // 0 ok, 1 expectation mismatch
};

// Runs the suites selected by the subcommand in dependency order. Throws on
// configuration and internal errors; the CLI maps those to exit codes 2 and 3.
RunResult run_scenario(const Scenario& sc, Subcommand cmd, const RunOptions& opt = {});

// Writes report.json and summary.txt into `out_dir` (created if missing).
void write_outputs(const RunResult& r, const std::string& out_dir);

}  // namespace sectorkit
