#pragma once

#include <map>
#include <string>
#include <vector>

#include "selfmod/serialize.hpp"
#include "selfmod/utility.hpp"

namespace selfmod::scenarios {

// Structured before/after comparison for one named game. Every number in a
// report comes straight from a solver call with the echoed configuration;
// nothing is recomputed by hand.
struct ScenarioReport {
  std::string name;
  Json config_echo = Json::object();
  Json baseline = Json::object();
  Json modified = Json::object();
  Json original_utility = Json::object();
  Json guard_verdicts = Json::array();
  std::map<std::string, bool> flags;
  Json extra = Json::object();

  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;

  std::string headline;  // one-line outcome used by the summary

  Json to_json() const;
  std::string to_csv() const;
  std::string summary() const;
};

struct PromiseConfig {
  double alice_nice_reward = 2.0;
  double alice_nice_noreward = -1.0;
  double alice_mean = 0.0;
  double production_nice = 10.0;
  double production_mean = 4.0;
  double reward_cost = 3.0;
  double commit_penalty = 4.0;
  GuardMode guard_mode = GuardMode::full_chain;

  void validate() const;
};

struct ThreatConfig {
  double alice_nice = 1.0;
  double alice_mean_nopunish = 2.0;
  double alice_mean_punish = -2.0;
  double production_nice = 10.0;
  double production_mean = 4.0;
  double punish_cost = 2.0;
  double commit_penalty = 3.0;
  GuardMode guard_mode = GuardMode::full_chain;

  void validate() const;
};

struct CastleConfig {
  double prior_strong = 0.5;
  double defender_leave = 0.0;
  double defender_raid = -2.0;
  double defender_destroy = -10.0;
  double attacker_leave = 0.0;
  double attacker_raid_strong = -1.0;
  double attacker_raid_weak = 4.0;
  double attacker_destroy_strong = -10.0;
  double attacker_destroy_weak = 10.0;

  void validate() const;
};

struct NegotiationConfig {
  int pie = 100;
  int grid_step = 1;
  std::string p1_type = "committed";  // "flexible" or "committed"
  double p1_threshold = 80.0;
  std::string p2_type = "flexible";
  double p2_threshold = 0.0;
  double commitment_penalty = 1000.0;

  void validate() const;
};

struct BlackmailConfig {
  double payment = 5.0;
  double harm = 10.0;
  double execution_cost = 1.0;
  double blackmailer_penalty = 100.0;
  double victim_penalty = 100.0;

  void validate() const;
};

struct MuggingConfig {
  double threat_prob = 1e-12;
  double harm = 1e15;
  double demand = 1.0;
  std::string policy = "unmodified";  // "probability-floor", "harm-cap"
  double prob_floor = 1e-6;
  double harm_cap = 1e6;

  void validate() const;
};

struct HostileConfig {
  // Hostile agent picks the action minimizing the DECLARED utility.
  std::vector<std::pair<std::string, FeatureVector>> actions{
      {"make_green", FeatureVector{{"green", 100.0}}},
      {"destroy_plain", FeatureVector{{"plain", -100.0}}},
      {"idle", FeatureVector{}}};
  UtilityFunction original{{"plain", 1.0}, {"green", 1.0}};
  UtilityFunction declared{{"plain", 1.0}, {"green", -10.0}};

  void validate() const;
};

struct AllianceConfig {
  Lottery solo = Lottery::degenerate(FeatureVector{{"paperclips", 4.0}});
  Lottery alliance =
      Lottery::degenerate(FeatureVector{{"paperclips", 6.0}, {"thumbtacks", 6.0}});
  Lottery war =
      Lottery::degenerate(FeatureVector{{"paperclips", 2.0}, {"thumbtacks", 2.0}});
  Lottery capitulation =
      Lottery::degenerate(FeatureVector{{"paperclips", 0.0}, {"thumbtacks", 12.0}});
  GuardMode guard_mode = GuardMode::full_chain;

  void validate() const;
};

struct ReversionConfig {
  double clean_value = 100.0;
  double reverted_value = -100.0;
  double suicide_value = 0.0;
  double search_cost = 5.0;
  double detection_prob = 0.9;
  std::vector<double> q_values{0.0, 1e-6, 0.01, 0.1, 0.5, 0.9, 1.0};

  void validate() const;
};

struct ScenarioSuiteConfig {
  PromiseConfig promise;
  ThreatConfig threat;
  CastleConfig castle;
  NegotiationConfig negotiation;
  BlackmailConfig blackmail;
  MuggingConfig mugging;
  HostileConfig hostile;
  AllianceConfig alliance;
  ReversionConfig reversion;
};

ScenarioReport run_promise(const PromiseConfig& cfg);
ScenarioReport run_threat(const ThreatConfig& cfg);
ScenarioReport run_castle(const CastleConfig& cfg);
ScenarioReport run_negotiation(const NegotiationConfig& cfg);
ScenarioReport run_blackmail(const BlackmailConfig& cfg);
ScenarioReport run_mugging(const MuggingConfig& cfg);
ScenarioReport run_hostile_benefit(const HostileConfig& cfg);
ScenarioReport run_alliance_chain(const AllianceConfig& cfg);
ScenarioReport run_reversion(const ReversionConfig& cfg);

// Registered scenario names, in CLI listing order.
const std::vector<std::string>& scenario_names();

ScenarioReport run_scenario(const std::string& name,
                            const ScenarioSuiteConfig& cfg);

// Promise/threat game builders, exposed so commitment thresholds can be
// probed and beliefs updated against the same trees the scenarios solve.
GameTree build_promise_tree(const PromiseConfig& cfg);
GameTree build_threat_tree(const ThreatConfig& cfg);
SignalingGame build_castle_game(const CastleConfig& cfg, bool honesty);

// Smallest penalty whose commitment flips the backward-induction outcome,
// found by bisection against the solver.
double promise_penalty_threshold(const PromiseConfig& cfg);
double threat_penalty_threshold(const ThreatConfig& cfg);

}  // namespace selfmod::scenarios
