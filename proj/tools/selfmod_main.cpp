// Command-line front end. Links the C API only; all simulation and solver
// logic lives behind the shared library boundary.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "selfmod/capi.h"

namespace {

struct CommonOptions {
  std::string config_path;
  uint64_t seed = 0;
  std::string out_path;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "TOML config file");
  cmd->add_option("--seed", opts.seed, "64-bit unsigned seed (default 0)");
  cmd->add_option("--out", opts.out_path, "output file path");
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

// Writes the report and prints the summary paragraph. Returns the exit code.
int emit_report(selfmod_report* report, const CommonOptions& opts) {
  const char* body = opts.format == "csv" ? selfmod_report_csv(report)
                                          : selfmod_report_json(report);
  int rc = 0;
  if (opts.out_path.empty()) {
    std::cout << body;
    if (opts.format == "json") std::cout << "\n";
    std::cerr << selfmod_report_summary(report) << "\n";
  } else {
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << opts.out_path << "'\n";
      rc = 2;
    } else {
      out << body;
      if (opts.format == "json") out << "\n";
      if (!out.good()) {
        std::cerr << "error: failed while writing '" << opts.out_path << "'\n";
        rc = 2;
      } else {
        std::cout << selfmod_report_summary(report) << "\n";
      }
    }
  }
  selfmod_report_free(report);
  return rc;
}

int status_to_exit(selfmod_status status) {
  switch (status) {
    case SELFMOD_OK: return 0;
    case SELFMOD_ERR_PARSE:
    case SELFMOD_ERR_CONFIG: return 1;
    case SELFMOD_ERR_RUNTIME: return 2;
  }
  return 2;
}

const char* c_path(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"selfmod: utility self-modification games and population simulation"};
  app.require_subcommand(1);

  std::string scenario_list = selfmod_scenario_names();

  // scenario <name>
  CommonOptions scen_opts;
  std::string scenario_name;
  CLI::App* scen = app.add_subcommand(
      "scenario", "run one scenario (" + scenario_list + ")");
  scen->add_option("name", scenario_name, "scenario name")->required();
  add_common(scen, scen_opts);

  // ecosystem
  CommonOptions eco_opts;
  int64_t rounds = -1;
  std::string mode;
  CLI::App* eco = app.add_subcommand("ecosystem", "run the population simulation");
  add_common(eco, eco_opts);
  eco->add_option("--rounds", rounds, "number of rounds (overrides config)");
  eco->add_option("--mode", mode, "adaptation mode")
      ->check(CLI::IsMember({"guarded", "selection", "cartel"}));

  // sweep
  CommonOptions sweep_opts;
  std::string param_key, values_csv;
  int64_t sweep_rounds = -1;
  std::string sweep_mode;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run once per value of one config field and merge the summaries");
  add_common(sweep, sweep_opts);
  sweep->add_option("--param", param_key, "config field, e.g. ecosystem.maintenance")
      ->required();
  sweep->add_option("--values", values_csv, "comma-separated value list")->required();
  sweep->add_option("--rounds", sweep_rounds, "number of rounds (overrides config)");
  sweep->add_option("--mode", sweep_mode, "adaptation mode")
      ->check(CLI::IsMember({"guarded", "selection", "cartel"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  selfmod_report* report = nullptr;
  selfmod_status status = SELFMOD_OK;
  const CommonOptions* opts = nullptr;

  if (scen->parsed()) {
    status = selfmod_scenario_run(scenario_name.c_str(),
                                  c_path(scen_opts.config_path), scen_opts.seed,
                                  &report);
    opts = &scen_opts;
  } else if (eco->parsed()) {
    status = selfmod_ecosystem_run(c_path(eco_opts.config_path),
                                   mode.empty() ? nullptr : mode.c_str(), rounds,
                                   eco_opts.seed, &report);
    opts = &eco_opts;
  } else {
    status = selfmod_sweep_run(c_path(sweep_opts.config_path), param_key.c_str(),
                               values_csv.c_str(),
                               sweep_mode.empty() ? nullptr : sweep_mode.c_str(),
                               sweep_rounds, sweep_opts.seed, &report);
    opts = &sweep_opts;
  }

  if (status != SELFMOD_OK) {
    std::cerr << "error: " << selfmod_last_error() << "\n";
    return status_to_exit(status);
  }
  return emit_report(report, *opts);
}
