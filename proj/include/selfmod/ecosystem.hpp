#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "selfmod/serialize.hpp"
#include "selfmod/utility.hpp"

namespace selfmod::eco {

// Pairwise game: a contested pool split by Tullock shares of the agents'
// influence weights, plus a conditional cooperation bonus paid when BOTH
// sides carry the observable cooperation commitment (p >= the commitment
// requirement). An optional conflict cost (off by default) charges both
// sides of a pair when both exceed an aggression threshold; it exists so a
// two-strategy population can induce an anti-coordination matrix.
struct CartelConfig {
  bool enabled = false;
  double cap = 0.4;          // members play min(p, cap)
  bool cheat_option = true;
  double gossip_prob = 1.0;  // chance a detected cheat is broadcast
  int punish_horizon = 50;   // rounds of punishment an agent weighs before cheating
};

struct VoldemortConfig {
  int agents = 100;
  double survivor_fraction = 0.7;
  double max_level = 10.0;
  double grid_step = 0.1;
  double survival_value = 1000.0;
  int max_iterations = 1000;
};

struct EcosystemConfig {
  int agents = 100;   // N, must be even
  long rounds = 10000;
  double contest_pool = 10.0;   // R
  double base_income = 2.0;     // b
  double maintenance = 7.0;     // m, the scarcity knob
  double tullock_gamma = 2.0;
  std::string adaptation = "guarded";  // "guarded" or "selection"
  GuardMode guard_mode = GuardMode::full_chain;
  double adapt_step = 0.025;   // delta
  double adapt_prob = 0.25;    // mu
  double coop_surplus = 0.2;   // S, split S/2 each
  double coop_commit_min_p = 0.9;
  double conflict_cost = 0.0;
  double conflict_min_p = 1.1;  // > 1 disables the conflict cost
  double initial_p_min = 0.0;
  double initial_p_max = 0.2;
  double initial_resources = 25.0;
  uint64_t seed = 0;
  CartelConfig cartel;
  VoldemortConfig voldemort;

  void validate() const;
  // Mean per-round income b + R/2; the scale maintenance sweeps refer to.
  double income_scale() const { return base_income + contest_pool / 2.0; }
};

struct EcoAgent {
  int id = 0;
  double p = 0.0;  // influence weight: L1 share of utility on the influence term
  double resources = 0.0;
  bool alive = true;
  double goal_score = 0.0;
  ModificationLedger ledger;
  bool cartel_member = false;
  bool known_cheater = false;   // cheat was gossiped to all members
  std::set<int> punishers;      // agents grim-triggering against this one
};

// {goal: 1-p, influence: p}, normalized.
UtilityFunction influence_split_utility(double p);

struct RoundMetrics {
  long round = 0;
  int alive = 0;
  double mean_p = 0.0;
  double min_p = 0.0;
  double max_p = 0.0;
  double dispersion = 0.0;
  double mean_resources = 0.0;
  double total_goal_score = 0.0;
  long cheats_this_round = 0;
};

struct PopulationState {
  long round = 0;
  std::vector<EcoAgent> agents;
  RoundMetrics metrics;
  long cheats_this_round = 0;
};

PopulationState init_population(const EcosystemConfig& cfg);

// One simulation round: random perfect matching, pair incomes, maintenance
// and death, goal accrual, then adaptation (guarded or selection).
void step_round(PopulationState& state, const EcosystemConfig& cfg);

struct SimResult {
  RoundMetrics initial_metrics;
  std::vector<RoundMetrics> trajectory;  // one row per simulated round
  PopulationState final_state;
  bool extinct = false;
  long extinct_round = -1;
  long total_cheats = 0;
  double cap_hold_fraction = 1.0;  // fraction of rounds with zero cheats

  std::string metrics_csv() const;
  Json summary_json() const;
  std::string summary_text() const;
};

SimResult run_sim(const EcosystemConfig& cfg);
SimResult run_sim(const EcosystemConfig& cfg, PopulationState state);

// run_sim with the cartel enabled; cap must lie in (0, 1).
SimResult run_cartel(const EcosystemConfig& cfg);

// Recomputes metrics from the agents. Dispersion is the max pairwise
// weight_distance between alive agents' normalized utility functions,
// exact up to 200 alive agents and over 10^4 seeded sampled pairs beyond.
RoundMetrics population_metrics(const PopulationState& state, uint64_t seed);

// Tullock share of the contested pool; equal split when both weights are 0.
double tullock_share(double p_self, double p_other, double gamma);

// Per-round income of an agent at p_self paired against p_other, before
// maintenance: pool share + cooperation bonus + base income - conflict cost.
double pair_income(const EcosystemConfig& cfg, double p_self, double p_other);

struct VoldemortResult {
  std::vector<double> levels;
  std::vector<bool> survived;
  double mean_level = 0.0;
  bool converged = false;
  int iterations = 0;

  Json summary_json() const;
};

// All-pay contest with irreversible levels: the top fraction survive, ties
// broken by agent id, and each agent raises to the cheapest surviving level
// while the survival value exceeds the increase. Iterated best response
// from all-zero until a fixed point or the iteration cap.
VoldemortResult voldemort_contest(const VoldemortConfig& cfg);

}  // namespace selfmod::eco
