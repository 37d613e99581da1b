#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "sectorkit/error.hpp"
#include "sectorkit/scenario.hpp"

using namespace sectorkit;

int main(int argc, char** argv) {
  CLI::App app{"sectorkit: charge sectors on region posets"};
  app.require_subcommand(1);
  std::string config, out = ".";
  int jobs = 1;
  long budget_h = -1, budget_c = -1;
  bool all_supports = false;
  for (const char* name : {"poset-check", "net-check", "cocycle-verify", "statistics", "functor-roundtrip", "all"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "scenario JSON")->required();
    sub->add_option("--out", out, "output directory");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 64));
    sub->add_option("--budget-homotopy", budget_h, "expanded-state cap for homotopy searches")->check(CLI::PositiveNumber);
    sub->add_option("--budget-cosets", budget_c, "coset table row cap")->check(CLI::PositiveNumber);
    sub->add_flag("--h1-all-supports", all_supports, "cross-check H1 with every common upper bound as support");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Subcommand cmd = parse_subcommand(app.get_subcommands().front()->get_name());
    std::ifstream in(config);
    if (!in) throw Error(ErrorKind::ConfigInvalid, "/: cannot read " + config);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::ConfigInvalid, std::string("/: ") + e.what());
    }
    Scenario sc = parse_scenario(j);
    RunOptions opt;
    opt.jobs = jobs;
    opt.budget_homotopy = budget_h;
    opt.budget_cosets = budget_c;
    opt.h1_all_supports = all_supports;
    RunResult r = run_scenario(sc, cmd, opt);
    write_outputs(r, out);
    std::cout << r.summary;
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << "sectorkit: " << e.what() << "\n";
    return e.kind == ErrorKind::ConfigInvalid || e.kind == ErrorKind::ParseError ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "sectorkit: internal error: " << e.what() << "\n";
    return 3;
  }
}
