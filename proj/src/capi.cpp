#include "selfmod/capi.h"

#include <sstream>
#include <string>

#include "selfmod/config.hpp"
#include "selfmod/ecosystem.hpp"
#include "selfmod/report.hpp"
#include "selfmod/scenarios.hpp"
#include "selfmod/serialize.hpp"

using namespace selfmod;

struct selfmod_report {
  std::string json;
  std::string csv;
  std::string summary;
};

struct selfmod_utility {
  UtilityFunction u;
  mutable std::string json_cache;
};

namespace {

thread_local std::string g_last_error;

selfmod_status status_of(const Error& e) {
  switch (e.code()) {
    case Errc::parse:
      return SELFMOD_ERR_PARSE;
    case Errc::io:
    case Errc::invalid_state:
      return SELFMOD_ERR_RUNTIME;
    default:
      return SELFMOD_ERR_CONFIG;
  }
}

template <typename Fn>
selfmod_status guarded_call(Fn&& fn) {
  try {
    fn();
    return SELFMOD_OK;
  } catch (const Error& e) {
    g_last_error = std::string(errc_name(e.code())) + ": " + e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SELFMOD_ERR_RUNTIME;
  }
}

std::string path_or_empty(const char* path) {
  return path == nullptr ? std::string() : std::string(path);
}

eco::EcosystemConfig ecosystem_config(const LoadedConfig& loaded,
                                      const char* mode, int64_t rounds,
                                      uint64_t seed) {
  eco::EcosystemConfig cfg = loaded.ecosystem;
  if (mode != nullptr && *mode != '\0') {
    std::string m = mode;
    if (m == "cartel") {
      cfg.cartel.enabled = true;
    } else if (m == "guarded" || m == "selection") {
      cfg.adaptation = m;
    } else {
      throw Error(Errc::config, "unknown mode '" + m + "'");
    }
  }
  if (rounds >= 0) cfg.rounds = rounds;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

Json ecosystem_config_json(const eco::EcosystemConfig& cfg) {
  return Json{{"agents", cfg.agents},
              {"rounds", cfg.rounds},
              {"contest_pool", cfg.contest_pool},
              {"base_income", cfg.base_income},
              {"maintenance", cfg.maintenance},
              {"tullock_gamma", cfg.tullock_gamma},
              {"adaptation", cfg.adaptation},
              {"guard_mode", guard_mode_name(cfg.guard_mode)},
              {"adapt_step", cfg.adapt_step},
              {"adapt_prob", cfg.adapt_prob},
              {"coop_surplus", cfg.coop_surplus},
              {"coop_commit_min_p", cfg.coop_commit_min_p},
              {"conflict_cost", cfg.conflict_cost},
              {"conflict_min_p", cfg.conflict_min_p},
              {"initial_p_min", cfg.initial_p_min},
              {"initial_p_max", cfg.initial_p_max},
              {"initial_resources", cfg.initial_resources},
              {"seed", cfg.seed},
              {"cartel", Json{{"enabled", cfg.cartel.enabled},
                              {"cap", cfg.cartel.cap},
                              {"cheat_option", cfg.cartel.cheat_option},
                              {"gossip_prob", cfg.cartel.gossip_prob},
                              {"punish_horizon", cfg.cartel.punish_horizon}}}};
}

selfmod_report* make_ecosystem_report(const eco::EcosystemConfig& cfg,
                                      const eco::SimResult& result) {
  auto* report = new selfmod_report;
  Json j{{"config", ecosystem_config_json(cfg)}, {"summary", result.summary_json()}};
  report->json = j.dump(2);
  report->csv = result.metrics_csv();
  report->summary = result.summary_text();
  return report;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

extern "C" {

const char* selfmod_last_error(void) { return g_last_error.c_str(); }

const char* selfmod_scenario_names(void) {
  static const std::string names = [] {
    std::string out;
    for (const auto& n : scenarios::scenario_names()) {
      if (!out.empty()) out += ',';
      out += n;
    }
    return out;
  }();
  return names.c_str();
}

selfmod_status selfmod_scenario_run(const char* name, const char* config_path,
                                    uint64_t seed, selfmod_report** out) {
  return guarded_call([&] {
    if (name == nullptr || out == nullptr) {
      throw Error(Errc::config, "scenario name and output handle are required");
    }
    LoadedConfig loaded = load_config_file(path_or_empty(config_path));
    scenarios::ScenarioReport r = scenarios::run_scenario(name, loaded.scenarios);
    auto* report = new selfmod_report;
    Json j = r.to_json();
    j["seed"] = seed;  // scenarios are deterministic; echoed for provenance
    report->json = j.dump(2);
    report->csv = r.to_csv();
    report->summary = r.summary();
    *out = report;
  });
}

selfmod_status selfmod_ecosystem_run(const char* config_path, const char* mode,
                                     int64_t rounds, uint64_t seed,
                                     selfmod_report** out) {
  return guarded_call([&] {
    if (out == nullptr) throw Error(Errc::config, "output handle is required");
    LoadedConfig loaded = load_config_file(path_or_empty(config_path));
    eco::EcosystemConfig cfg = ecosystem_config(loaded, mode, rounds, seed);
    eco::SimResult result =
        cfg.cartel.enabled ? eco::run_cartel(cfg) : eco::run_sim(cfg);
    *out = make_ecosystem_report(cfg, result);
  });
}

selfmod_status selfmod_sweep_run(const char* config_path, const char* param_key,
                                 const char* values_csv, const char* mode,
                                 int64_t rounds, uint64_t seed,
                                 selfmod_report** out) {
  return guarded_call([&] {
    if (out == nullptr || param_key == nullptr || values_csv == nullptr) {
      throw Error(Errc::config, "sweep needs a parameter key and a value list");
    }
    std::string key = param_key;
    std::vector<std::string> values = split_csv_list(values_csv);
    if (values.empty()) throw Error(Errc::config, "sweep value list is empty");

    std::string base_path = path_or_empty(config_path);
    toml::Document base_doc =
        base_path.empty() ? toml::Document{} : toml::parse_file(base_path);

    // "scenario.<name>.x" sweeps that scenario; "ecosystem.x" the simulation.
    std::string scenario_name;
    if (key.rfind("scenario.", 0) == 0) {
      auto rest = key.substr(9);
      auto dot = rest.find('.');
      if (dot == std::string::npos) {
        throw Error(Errc::config, "sweep key must name a field: '" + key + "'");
      }
      scenario_name = rest.substr(0, dot);
    } else if (key.rfind("ecosystem.", 0) != 0) {
      throw Error(Errc::config,
                  "sweep key must start with 'scenario.<name>.' or 'ecosystem.': '" +
                      key + "'");
    }

    Json runs = Json::array();
    std::string csv;
    std::string summary;
    for (const auto& value_text : values) {
      toml::Document doc = base_doc;
      apply_override(doc, key, value_text);
      LoadedConfig loaded = config_from_document(doc);

      if (scenario_name.empty()) {
        eco::EcosystemConfig cfg = ecosystem_config(loaded, mode, rounds, seed);
        eco::SimResult result =
            cfg.cartel.enabled ? eco::run_cartel(cfg) : eco::run_sim(cfg);
        runs.push_back(Json{{"value", value_text},
                            {"summary", result.summary_json()}});
        if (csv.empty()) {
          csv = "param_value,rounds,alive,mean_p,min_p,max_p,dispersion,"
                "mean_resources,total_goal_score,total_cheats\n";
        }
        const eco::RoundMetrics& f = result.trajectory.empty()
                                         ? result.initial_metrics
                                         : result.trajectory.back();
        csv += csv_escape(value_text) + "," + std::to_string(f.round) + "," +
               std::to_string(f.alive) + "," + format_double(f.mean_p) + "," +
               format_double(f.min_p) + "," + format_double(f.max_p) + "," +
               format_double(f.dispersion) + "," +
               format_double(f.mean_resources) + "," +
               format_double(f.total_goal_score) + "," +
               std::to_string(result.total_cheats) + "\n";
        if (!summary.empty()) summary += " ";
        summary += key + "=" + value_text + ": mean_p " + format_double(f.mean_p) + ".";
      } else {
        scenarios::ScenarioReport r =
            scenarios::run_scenario(scenario_name, loaded.scenarios);
        runs.push_back(Json{{"value", value_text}, {"report", r.to_json()}});
        std::string one = r.to_csv();
        if (csv.empty()) {
          csv = "param_value," + one.substr(0, one.find('\n')) + "\n";
        }
        size_t pos = one.find('\n') + 1;
        while (pos < one.size()) {
          size_t end = one.find('\n', pos);
          csv += csv_escape(value_text) + "," + one.substr(pos, end - pos) + "\n";
          pos = end + 1;
        }
        if (!summary.empty()) summary += " ";
        summary += key + "=" + value_text + ": " + r.headline;
      }
    }

    auto* report = new selfmod_report;
    Json j{{"sweep", Json{{"param", key}, {"seed", seed}}}, {"runs", runs}};
    report->json = j.dump(2);
    report->csv = csv;
    report->summary = summary;
    *out = report;
  });
}

selfmod_status selfmod_voldemort_run(const char* config_path,
                                     selfmod_report** out) {
  return guarded_call([&] {
    if (out == nullptr) throw Error(Errc::config, "output handle is required");
    LoadedConfig loaded = load_config_file(path_or_empty(config_path));
    eco::VoldemortResult result = eco::voldemort_contest(loaded.ecosystem.voldemort);
    auto* report = new selfmod_report;
    report->json = result.summary_json().dump(2);
    CsvWriter csv({"agent", "level", "survived"});
    for (size_t i = 0; i < result.levels.size(); ++i) {
      csv.add_row({std::to_string(i), format_double(result.levels[i]),
                   result.survived[i] ? "true" : "false"});
    }
    report->csv = csv.str();
    report->summary = "mean mutilation level " + format_double(result.mean_level) +
                      (result.converged ? " at a fixed point." : " (iteration cap hit).");
    *out = report;
  });
}

const char* selfmod_report_json(const selfmod_report* report) {
  return report == nullptr ? "" : report->json.c_str();
}

const char* selfmod_report_csv(const selfmod_report* report) {
  return report == nullptr ? "" : report->csv.c_str();
}

const char* selfmod_report_summary(const selfmod_report* report) {
  return report == nullptr ? "" : report->summary.c_str();
}

void selfmod_report_free(selfmod_report* report) { delete report; }

selfmod_status selfmod_utility_parse(const char* json, selfmod_utility** out) {
  return guarded_call([&] {
    if (json == nullptr || out == nullptr) {
      throw Error(Errc::config, "utility JSON and output handle are required");
    }
    Json j = Json::parse(json, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::parse, "invalid JSON");
    *out = new selfmod_utility{utility_from_json(j), {}};
  });
}

const char* selfmod_utility_json(const selfmod_utility* u) {
  if (u == nullptr) return "";
  u->json_cache = utility_to_json(u->u).dump();
  return u->json_cache.c_str();
}

selfmod_status selfmod_utility_evaluate(const selfmod_utility* u,
                                        const char* features_json,
                                        double* out_value) {
  return guarded_call([&] {
    if (u == nullptr || features_json == nullptr || out_value == nullptr) {
      throw Error(Errc::config, "utility, features and output are required");
    }
    Json j = Json::parse(features_json, nullptr, false);
    if (j.is_discarded()) throw Error(Errc::parse, "invalid JSON");
    *out_value = evaluate(u->u, feature_vector_from_json(j));
  });
}

selfmod_status selfmod_utility_renormalize(const selfmod_utility* u,
                                           selfmod_utility** out) {
  return guarded_call([&] {
    if (u == nullptr || out == nullptr) {
      throw Error(Errc::config, "utility and output handle are required");
    }
    *out = new selfmod_utility{renormalize(u->u), {}};
  });
}

selfmod_status selfmod_utility_add_commitment(const selfmod_utility* u,
                                              const char* indicator,
                                              double penalty,
                                              selfmod_utility** out) {
  return guarded_call([&] {
    if (u == nullptr || indicator == nullptr || out == nullptr) {
      throw Error(Errc::config, "utility, indicator and output handle are required");
    }
    *out = new selfmod_utility{add_commitment(u->u, indicator, penalty), {}};
  });
}

selfmod_status selfmod_utility_distance(const selfmod_utility* a,
                                        const selfmod_utility* b,
                                        double* out_value) {
  return guarded_call([&] {
    if (a == nullptr || b == nullptr || out_value == nullptr) {
      throw Error(Errc::config, "two utilities and an output are required");
    }
    *out_value = weight_distance(a->u, b->u);
  });
}

void selfmod_utility_free(selfmod_utility* u) { delete u; }

}  // extern "C"
