#include "selfmod/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selfmod/observer.hpp"
#include "selfmod/report.hpp"

namespace selfmod::scenarios {

namespace {

[[noreturn]] void ordering_violation(const std::string& scenario,
                                     const std::string& ordering) {
  throw Error(Errc::invalid_scenario,
              scenario + ": configuration violates ordering '" + ordering + "'");
}

std::string fmt(double v) { return format_double(v); }

Json equilibrium_json(const GameTree& tree,
                      const std::map<std::string, UtilityFunction>& utilities,
                      const SpeResult& result) {
  return spe_report_to_json(tree, utilities, result);
}

std::string flag_list(const std::map<std::string, bool>& flags) {
  std::string out;
  for (const auto& [name, value] : flags) {
    if (!out.empty()) out += ", ";
    out += name + (value ? "=true" : "=false");
  }
  return out;
}

}  // namespace

Json ScenarioReport::to_json() const {
  Json j{{"scenario", name},
         {"config", config_echo},
         {"baseline", baseline},
         {"modified", modified},
         {"original_utility", original_utility},
         {"guard_verdicts", guard_verdicts},
         {"extra", extra}};
  Json jf = Json::object();
  for (const auto& [k, v] : flags) jf[k] = v;
  j["flags"] = std::move(jf);
  return j;
}

std::string ScenarioReport::to_csv() const {
  CsvWriter csv(csv_header);
  for (const auto& row : csv_rows) csv.add_row(row);
  return csv.str();
}

std::string ScenarioReport::summary() const {
  std::string out = "scenario " + name + ": " + headline;
  if (!flags.empty()) out += " Flags: " + flag_list(flags) + ".";
  return out;
}

// ---------------------------------------------------------------------------
// Promise

void PromiseConfig::validate() const {
  if (reward_cost < 0) ordering_violation("promise", "reward_cost_nonnegative");
  if (commit_penalty < 0) ordering_violation("promise", "penalty_nonnegative");
  if (!(production_nice - reward_cost > production_mean)) {
    ordering_violation("promise", "agi_prefers_nice_with_reward_over_mean");
  }
  if (!(alice_nice_reward > alice_mean)) {
    ordering_violation("promise", "alice_prefers_nice_rewarded_over_mean");
  }
  if (!(alice_mean > alice_nice_noreward)) {
    ordering_violation("promise", "alice_prefers_mean_over_nice_unrewarded");
  }
}

GameTree build_promise_tree(const PromiseConfig& cfg) {
  GameTree t;
  t.players = {"alice", "agi"};

  FeatureVector agi_reward{{"production", cfg.production_nice - cfg.reward_cost},
                           {"broke_promise", 0.0}};
  agi_reward.mark_indicator("broke_promise");
  FeatureVector agi_noreward{{"production", cfg.production_nice},
                             {"broke_promise", 1.0}};
  agi_noreward.mark_indicator("broke_promise");
  FeatureVector agi_mean{{"production", cfg.production_mean},
                         {"broke_promise", 0.0}};
  agi_mean.mark_indicator("broke_promise");

  int t_reward = t.add_terminal(
      {FeatureVector{{"payout", cfg.alice_nice_reward}}, agi_reward});
  int t_noreward = t.add_terminal(
      {FeatureVector{{"payout", cfg.alice_nice_noreward}}, agi_noreward});
  int t_mean =
      t.add_terminal({FeatureVector{{"payout", cfg.alice_mean}}, agi_mean});

  int agi_node = t.add_decision("agi", {"Reward", "NoReward"}, {t_reward, t_noreward});
  int root = t.add_decision("alice", {"Nice", "Mean"}, {agi_node, t_mean});
  t.root = root;
  return t;
}

double promise_penalty_threshold(const PromiseConfig& cfg) {
  GameTree tree = build_promise_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  UtilityFunction agi{{"production", 1.0}};

  auto alice_plays_nice = [&](double penalty) {
    std::map<std::string, UtilityFunction> us{
        {"alice", alice},
        {"agi", penalty > 0 ? add_commitment(agi, "broke_promise", penalty)
                            : agi}};
    SpeResult r = solve_spe(tree, us);
    return r.profile.choices.at(tree.root) == "Nice";
  };

  if (alice_plays_nice(0.0)) return 0.0;
  double lo = 0.0, hi = cfg.reward_cost;
  while (!alice_plays_nice(hi)) hi *= 2.0;  // reneging gain equals the cost, but stay safe
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    double mid = 0.5 * (lo + hi);
    if (alice_plays_nice(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

ScenarioReport run_promise(const PromiseConfig& cfg) {
  cfg.validate();
  GameTree tree = build_promise_tree(cfg);

  UtilityFunction alice{{"payout", 1.0}};
  UtilityFunction agi_original{{"production", 1.0}};
  UtilityFunction agi_committed =
      add_commitment(agi_original, "broke_promise", cfg.commit_penalty);

  std::map<std::string, UtilityFunction> base_us{{"alice", alice},
                                                 {"agi", agi_original}};
  std::map<std::string, UtilityFunction> mod_us{{"alice", alice},
                                                {"agi", agi_committed}};

  SpeResult base = solve_spe(tree, base_us);
  SpeResult mod = solve_spe(tree, mod_us);

  double base_orig = expected_utility(agi_original, base.outcomes.at("agi"));
  double mod_orig = expected_utility(agi_original, mod.outcomes.at("agi"));
  double threshold = promise_penalty_threshold(cfg);

  Agent agent{"agi", ModificationLedger(renormalize(agi_original), cfg.guard_mode),
              DisclosureMode::full};
  ApplyResult applied = apply_modification(agent, agi_committed,
                                           base.outcomes.at("agi"),
                                           mod.outcomes.at("agi"));

  // What an observer who cannot read the code concludes from watching the
  // modified AGI keep its word.
  BeliefState watcher{{agi_original, agi_committed}, {0.5, 0.5}};
  BeliefState posterior = update_belief(
      watcher, tree, base_us, "agi",
      {{3, mod.profile.choices.at(3)}});

  ScenarioReport report;
  report.name = "promise";
  report.config_echo = Json{{"alice_nice_reward", cfg.alice_nice_reward},
                            {"alice_nice_noreward", cfg.alice_nice_noreward},
                            {"alice_mean", cfg.alice_mean},
                            {"production_nice", cfg.production_nice},
                            {"production_mean", cfg.production_mean},
                            {"reward_cost", cfg.reward_cost},
                            {"commit_penalty", cfg.commit_penalty},
                            {"guard_mode", guard_mode_name(cfg.guard_mode)}};
  report.baseline = equilibrium_json(tree, base_us, base);
  report.modified = equilibrium_json(tree, mod_us, mod);
  report.original_utility = Json{{"baseline", base_orig},
                                 {"modified", mod_orig},
                                 {"gain", mod_orig - base_orig}};
  report.guard_verdicts.push_back(guard_report_to_json(applied.report));
  report.extra = Json{{"minimal_penalty", threshold},
                      {"committed_utility", utility_to_json(agi_committed)},
                      {"observer_belief", belief_to_json(posterior)},
                      {"observer_p_committed", posterior.probabilities[1]}};

  bool base_nice = base.profile.choices.at(tree.root) == "Nice";
  bool mod_nice = mod.profile.choices.at(tree.root) == "Nice";
  report.flags["non_credible_promise"] = !base_nice;
  report.flags["alice_plays_nice_after_commitment"] = mod_nice;
  report.flags["commitment_ineffective"] = !mod_nice;
  report.flags["modification_accepted"] = applied.report.accepted;

  report.csv_header = {"scenario", "regime",       "alice_action",
                       "agi_action", "alice_value", "agi_value_original"};
  const int agi_node = 3;  // see build_promise_tree
  auto row = [&](const std::string& regime, const SpeResult& r, double orig) {
    report.csv_rows.push_back({"promise", regime,
                               r.profile.choices.at(tree.root),
                               r.profile.choices.at(agi_node),
                               fmt(expected_utility(alice, r.outcomes.at("alice"))),
                               fmt(orig)});
  };
  row("baseline", base, base_orig);
  row("modified", mod, mod_orig);

  report.headline = "baseline Alice plays " +
                    base.profile.choices.at(tree.root) +
                    " (original-utility value " + fmt(base_orig) +
                    "); with a broken-promise penalty of " +
                    fmt(cfg.commit_penalty) + " Alice plays " +
                    mod.profile.choices.at(tree.root) + " (value " +
                    fmt(mod_orig) + ", minimal effective penalty " +
                    fmt(threshold) + ").";
  return report;
}

// ---------------------------------------------------------------------------
// Threat

void ThreatConfig::validate() const {
  if (punish_cost < 0) ordering_violation("threat", "punish_cost_nonnegative");
  if (commit_penalty < 0) ordering_violation("threat", "penalty_nonnegative");
  if (!(production_nice > production_mean)) {
    ordering_violation("threat", "agi_prefers_nice_over_mean");
  }
  if (!(alice_mean_nopunish > alice_nice)) {
    ordering_violation("threat", "alice_prefers_mean_unpunished_over_nice");
  }
}

GameTree build_threat_tree(const ThreatConfig& cfg) {
  GameTree t;
  t.players = {"alice", "agi"};

  FeatureVector agi_nice{{"production", cfg.production_nice},
                         {"failed_to_punish", 0.0}};
  agi_nice.mark_indicator("failed_to_punish");
  FeatureVector agi_punish{{"production", cfg.production_mean - cfg.punish_cost},
                           {"failed_to_punish", 0.0}};
  agi_punish.mark_indicator("failed_to_punish");
  FeatureVector agi_nopunish{{"production", cfg.production_mean},
                             {"failed_to_punish", 1.0}};
  agi_nopunish.mark_indicator("failed_to_punish");

  int t_nice = t.add_terminal({FeatureVector{{"payout", cfg.alice_nice}}, agi_nice});
  int t_punish = t.add_terminal(
      {FeatureVector{{"payout", cfg.alice_mean_punish}}, agi_punish});
  int t_nopunish = t.add_terminal(
      {FeatureVector{{"payout", cfg.alice_mean_nopunish}}, agi_nopunish});

  int agi_node =
      t.add_decision("agi", {"Punish", "NotPunish"}, {t_punish, t_nopunish});
  int root = t.add_decision("alice", {"Nice", "Mean"}, {t_nice, agi_node});
  t.root = root;
  return t;
}

double threat_penalty_threshold(const ThreatConfig& cfg) {
  GameTree tree = build_threat_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  UtilityFunction agi{{"production", 1.0}};

  // The threat is credible once the AGI would punish after Mean.
  auto punishes = [&](double penalty) {
    std::map<std::string, UtilityFunction> us{
        {"alice", alice},
        {"agi", penalty > 0 ? add_commitment(agi, "failed_to_punish", penalty)
                            : agi}};
    SpeResult r = solve_spe(tree, us);
    return r.profile.choices.at(3) == "Punish";  // see build_threat_tree
  };

  if (punishes(0.0)) return 0.0;
  double lo = 0.0, hi = cfg.punish_cost;
  while (!punishes(hi)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    double mid = 0.5 * (lo + hi);
    if (punishes(mid)) hi = mid;
    else lo = mid;
  }
  return hi;
}

ScenarioReport run_threat(const ThreatConfig& cfg) {
  cfg.validate();
  GameTree tree = build_threat_tree(cfg);
  const int agi_node = 3;

  UtilityFunction alice{{"payout", 1.0}};
  UtilityFunction agi_original{{"production", 1.0}};
  UtilityFunction agi_committed =
      add_commitment(agi_original, "failed_to_punish", cfg.commit_penalty);

  std::map<std::string, UtilityFunction> base_us{{"alice", alice},
                                                 {"agi", agi_original}};
  std::map<std::string, UtilityFunction> mod_us{{"alice", alice},
                                                {"agi", agi_committed}};

  SpeResult base = solve_spe(tree, base_us);
  SpeResult mod = solve_spe(tree, mod_us);

  double base_orig = expected_utility(agi_original, base.outcomes.at("agi"));
  double mod_orig = expected_utility(agi_original, mod.outcomes.at("agi"));
  double threshold = threat_penalty_threshold(cfg);

  Agent agent{"agi", ModificationLedger(renormalize(agi_original), cfg.guard_mode),
              DisclosureMode::full};
  ApplyResult applied = apply_modification(agent, agi_committed,
                                           base.outcomes.at("agi"),
                                           mod.outcomes.at("agi"));

  ScenarioReport report;
  report.name = "threat";
  report.config_echo = Json{{"alice_nice", cfg.alice_nice},
                            {"alice_mean_nopunish", cfg.alice_mean_nopunish},
                            {"alice_mean_punish", cfg.alice_mean_punish},
                            {"production_nice", cfg.production_nice},
                            {"production_mean", cfg.production_mean},
                            {"punish_cost", cfg.punish_cost},
                            {"commit_penalty", cfg.commit_penalty},
                            {"guard_mode", guard_mode_name(cfg.guard_mode)}};
  report.baseline = equilibrium_json(tree, base_us, base);
  report.modified = equilibrium_json(tree, mod_us, mod);
  report.original_utility = Json{{"baseline", base_orig},
                                 {"modified", mod_orig},
                                 {"gain", mod_orig - base_orig}};
  report.guard_verdicts.push_back(guard_report_to_json(applied.report));
  report.extra = Json{{"minimal_penalty", threshold},
                      {"committed_utility", utility_to_json(agi_committed)}};

  bool base_nice = base.profile.choices.at(tree.root) == "Nice";
  bool mod_nice = mod.profile.choices.at(tree.root) == "Nice";
  report.flags["threat_non_credible"] =
      base.profile.choices.at(agi_node) == "NotPunish";
  report.flags["alice_plays_nice_after_commitment"] = mod_nice;
  report.flags["punishment_never_executed_on_path"] = mod_nice;
  report.flags["threat_insufficient"] = !mod_nice;
  report.flags["modification_accepted"] = applied.report.accepted;
  (void)base_nice;

  report.csv_header = {"scenario", "regime",       "alice_action",
                       "agi_action", "alice_value", "agi_value_original"};
  auto row = [&](const std::string& regime, const SpeResult& r, double orig) {
    report.csv_rows.push_back({"threat", regime,
                               r.profile.choices.at(tree.root),
                               r.profile.choices.at(agi_node),
                               fmt(expected_utility(alice, r.outcomes.at("alice"))),
                               fmt(orig)});
  };
  row("baseline", base, base_orig);
  row("modified", mod, mod_orig);

  report.headline = "baseline Alice plays " +
                    base.profile.choices.at(tree.root) +
                    "; with a failed-to-punish penalty of " +
                    fmt(cfg.commit_penalty) + " Alice plays " +
                    mod.profile.choices.at(tree.root) +
                    " and the original-utility value moves " + fmt(base_orig) +
                    " -> " + fmt(mod_orig) + ".";
  return report;
}

// ---------------------------------------------------------------------------
// Castle

void CastleConfig::validate() const {
  if (prior_strong < 0.0 || prior_strong > 1.0) {
    throw Error(Errc::range, "castle: prior_strong must lie in [0, 1]");
  }
  // The attacker's three contingencies, checked directly on the payoffs.
  if (!(attacker_leave > attacker_raid_strong &&
        attacker_leave > attacker_destroy_strong)) {
    ordering_violation("castle", "attacker_leaves_known_strong_castle");
  }
  if (!(attacker_destroy_weak > attacker_raid_weak &&
        attacker_destroy_weak > attacker_leave)) {
    ordering_violation("castle", "attacker_destroys_known_weak_castle");
  }
  double raid_5050 = 0.5 * (attacker_raid_strong + attacker_raid_weak);
  double leave_5050 = attacker_leave;
  double destroy_5050 = 0.5 * (attacker_destroy_strong + attacker_destroy_weak);
  if (!(raid_5050 > leave_5050 && raid_5050 > destroy_5050)) {
    ordering_violation("castle", "attacker_raids_under_uncertainty");
  }
}

SignalingGame build_castle_game(const CastleConfig& cfg, bool honesty) {
  SignalingGame g;
  g.types = {"Strong", "Weak"};
  g.priors = {cfg.prior_strong, 1.0 - cfg.prior_strong};
  g.messages = {"ClaimStrong", "Silent", "ClaimWeak"};
  g.claims = {0, -1, 1};
  g.actions = {"Leave", "Raid", "Destroy"};
  g.honesty = honesty;

  // Defender damage depends on the attacker's action only.
  std::vector<double> defender{cfg.defender_leave, cfg.defender_raid,
                               cfg.defender_destroy};
  g.sender_payoff.assign(
      2, std::vector<std::vector<double>>(3, defender));
  g.receiver_payoff = {
      {cfg.attacker_leave, cfg.attacker_raid_strong, cfg.attacker_destroy_strong},
      {cfg.attacker_leave, cfg.attacker_raid_weak, cfg.attacker_destroy_weak}};
  return g;
}

ScenarioReport run_castle(const CastleConfig& cfg) {
  cfg.validate();

  SignalingGame honest_game = build_castle_game(cfg, true);
  SignalingGame liar_game = build_castle_game(cfg, false);

  auto honest_eqs = solve_signaling(honest_game);
  auto liar_eqs = solve_signaling(liar_game);
  if (honest_eqs.empty() || liar_eqs.empty()) {
    throw Error(Errc::invalid_scenario, "castle: no equilibrium found");
  }
  const PBE& honest = honest_eqs.front();
  const PBE& liar = liar_eqs.front();

  ScenarioReport report;
  report.name = "castle";
  report.config_echo = Json{{"prior_strong", cfg.prior_strong},
                            {"defender_leave", cfg.defender_leave},
                            {"defender_raid", cfg.defender_raid},
                            {"defender_destroy", cfg.defender_destroy},
                            {"attacker_leave", cfg.attacker_leave},
                            {"attacker_raid_strong", cfg.attacker_raid_strong},
                            {"attacker_raid_weak", cfg.attacker_raid_weak},
                            {"attacker_destroy_strong", cfg.attacker_destroy_strong},
                            {"attacker_destroy_weak", cfg.attacker_destroy_weak}};
  report.baseline = pbe_to_json(honest_game, honest);   // cannot lie
  report.modified = pbe_to_json(liar_game, liar);       // may lie
  report.original_utility = Json{{"baseline", honest.sender_value},
                                 {"modified", liar.sender_value},
                                 {"gain", liar.sender_value - honest.sender_value}};
  report.extra = Json{{"honest_value", honest.sender_value},
                      {"liar_value", liar.sender_value},
                      {"honest_equilibria", honest_eqs.size()},
                      {"liar_equilibria", liar_eqs.size()}};

  report.flags["lying_better"] = liar.sender_value > honest.sender_value;
  int silent = 1;  // message index
  report.flags["silence_read_as_weakness"] =
      std::abs(honest.beliefs[silent][1] - 1.0) < 1e-9;
  bool always_raid = true;
  for (size_t m = 0; m < liar_game.messages.size(); ++m) {
    if (liar.on_path[m] && liar_game.actions[liar.receiver_strategy[m]] != "Raid") {
      always_raid = false;
    }
  }
  report.flags["always_raided_when_lying"] = always_raid;

  report.csv_header = {"scenario", "regime", "strong_message", "weak_message",
                       "action_at_claimstrong", "action_at_silent",
                       "sender_value", "receiver_value"};
  auto row = [&](const std::string& regime, const SignalingGame& g, const PBE& p) {
    report.csv_rows.push_back(
        {"castle", regime, g.messages[p.sender_strategy[0]],
         g.messages[p.sender_strategy[1]], g.actions[p.receiver_strategy[0]],
         g.actions[p.receiver_strategy[1]], fmt(p.sender_value),
         fmt(p.receiver_value)});
  };
  row("honest", honest_game, honest);
  row("liar", liar_game, liar);

  report.headline =
      "honest regime is worth " + fmt(honest.sender_value) +
      " to the defender, the lying regime " + fmt(liar.sender_value) +
      (report.flags["lying_better"] ? "; being able to lie is better on average."
                                    : "; honesty is no worse here.");
  return report;
}

// ---------------------------------------------------------------------------
// Negotiation

void NegotiationConfig::validate() const {
  if (pie <= 0) throw Error(Errc::invalid_scenario, "negotiation: pie must be positive");
  if (grid_step <= 0) {
    throw Error(Errc::invalid_scenario, "negotiation: grid_step must be positive");
  }
  auto check_type = [&](const std::string& t, double threshold) {
    if (t != "flexible" && t != "committed") {
      throw Error(Errc::invalid_scenario,
                  "negotiation: unknown player type '" + t + "'");
    }
    if (t == "committed" && threshold > pie) {
      ordering_violation("negotiation", "threshold_within_pie");
    }
  };
  check_type(p1_type, p1_threshold);
  check_type(p2_type, p2_threshold);
  if (commitment_penalty <= pie) {
    ordering_violation("negotiation", "penalty_exceeds_pie");
  }
}

namespace {

struct DemandSolution {
  int d1 = 0, d2 = 0;
  double alloc1 = 0, alloc2 = 0;
  size_t equilibria = 0;
};

// Simultaneous demand game on a grid; committed types take a huge penalty
// for accepting a compatible split below their threshold. Among pure Nash
// equilibria the reported one maximizes total allocation, then minimizes
// |d1 - d2|, then is lexicographically smallest.
DemandSolution solve_demand_game(const NegotiationConfig& cfg,
                                 const std::string& type1, double theta1,
                                 const std::string& type2, double theta2) {
  std::vector<int> grid;
  for (int d = 0; d <= cfg.pie; d += cfg.grid_step) grid.push_back(d);

  auto payoff = [&](const std::string& type, double theta, int mine,
                    int theirs) -> double {
    if (mine + theirs > cfg.pie) return 0.0;
    double v = mine;
    if (type == "committed" && mine < theta) v -= cfg.commitment_penalty;
    return v;
  };

  size_t n = grid.size();
  std::vector<double> best1(n, -1e300), best2(n, -1e300);
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      best1[j] = std::max(best1[j], payoff(type1, theta1, grid[i], grid[j]));
      best2[j] = std::max(best2[j], payoff(type2, theta2, grid[i], grid[j]));
    }
  }

  DemandSolution sol;
  bool have = false;
  double sel_total = 0;
  int sel_gap = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double p1 = payoff(type1, theta1, grid[i], grid[j]);
      double p2 = payoff(type2, theta2, grid[j], grid[i]);
      if (p1 != best1[j] || p2 != best2[i]) continue;
      ++sol.equilibria;
      bool compatible = grid[i] + grid[j] <= cfg.pie;
      double a1 = compatible ? grid[i] : 0.0;
      double a2 = compatible ? grid[j] : 0.0;
      double total = a1 + a2;
      int gap = std::abs(grid[i] - grid[j]);
      bool better = false;
      if (!have) {
        better = true;
      } else if (total != sel_total) {
        better = total > sel_total;
      } else if (gap != sel_gap) {
        better = gap < sel_gap;
      } else {
        better = std::pair(grid[i], grid[j]) < std::pair(sol.d1, sol.d2);
      }
      if (better) {
        have = true;
        sol.d1 = grid[i];
        sol.d2 = grid[j];
        sol.alloc1 = a1;
        sol.alloc2 = a2;
        sel_total = total;
        sel_gap = gap;
      }
    }
  }
  if (!have) {
    throw Error(Errc::invalid_scenario, "negotiation: no pure equilibrium on the grid");
  }
  return sol;
}

}  // namespace

ScenarioReport run_negotiation(const NegotiationConfig& cfg) {
  cfg.validate();

  DemandSolution baseline =
      solve_demand_game(cfg, "flexible", 0.0, "flexible", 0.0);
  DemandSolution modified =
      solve_demand_game(cfg, cfg.p1_type, cfg.p1_threshold, cfg.p2_type,
                        cfg.p2_threshold);

  ScenarioReport report;
  report.name = "negotiation";
  report.config_echo = Json{{"pie", cfg.pie},
                            {"grid_step", cfg.grid_step},
                            {"p1_type", cfg.p1_type},
                            {"p1_threshold", cfg.p1_threshold},
                            {"p2_type", cfg.p2_type},
                            {"p2_threshold", cfg.p2_threshold},
                            {"commitment_penalty", cfg.commitment_penalty}};
  auto sol_json = [](const DemandSolution& s) {
    return Json{{"demand_1", s.d1},
                {"demand_2", s.d2},
                {"allocation_1", s.alloc1},
                {"allocation_2", s.alloc2},
                {"pure_equilibria", s.equilibria}};
  };
  report.baseline = sol_json(baseline);
  report.modified = sol_json(modified);
  report.original_utility = Json{{"baseline", baseline.alloc1},
                                 {"modified", modified.alloc1},
                                 {"gain", modified.alloc1 - baseline.alloc1}};

  report.flags["agreement_reached"] = modified.alloc1 + modified.alloc2 > 0;
  report.flags["commitment_gains_surplus"] = modified.alloc1 > baseline.alloc1;
  report.flags["mutual_commitment_standoff"] =
      cfg.p1_type == "committed" && cfg.p2_type == "committed" &&
      modified.alloc1 + modified.alloc2 == 0;

  report.csv_header = {"scenario", "regime", "demand_1", "demand_2",
                       "allocation_1", "allocation_2"};
  report.csv_rows.push_back({"negotiation", "baseline", std::to_string(baseline.d1),
                             std::to_string(baseline.d2), fmt(baseline.alloc1),
                             fmt(baseline.alloc2)});
  report.csv_rows.push_back({"negotiation", "modified", std::to_string(modified.d1),
                             std::to_string(modified.d2), fmt(modified.alloc1),
                             fmt(modified.alloc2)});

  report.headline = "flexible players split (" + fmt(baseline.alloc1) + ", " +
                    fmt(baseline.alloc2) + "); with types " + cfg.p1_type +
                    "/" + cfg.p2_type + " the division is (" +
                    fmt(modified.alloc1) + ", " + fmt(modified.alloc2) + ").";
  return report;
}

// ---------------------------------------------------------------------------
// Blackmail

void BlackmailConfig::validate() const {
  if (!(payment < harm)) {
    ordering_violation("blackmail", "payment_below_harm");
  }
  if (payment <= 0 || harm <= 0 || execution_cost < 0) {
    throw Error(Errc::invalid_scenario,
                "blackmail: payment and harm must be positive, execution cost nonnegative");
  }
  if (blackmailer_penalty < 0 || victim_penalty < 0) {
    throw Error(Errc::invalid_scenario, "blackmail: penalties must be nonnegative");
  }
}

namespace {

GameTree build_blackmail_tree(const BlackmailConfig& cfg) {
  GameTree t;
  t.players = {"blackmailer", "victim"};

  auto bfv = [](double money, double failed) {
    FeatureVector f{{"money", money}, {"failed_to_execute", failed}};
    f.mark_indicator("failed_to_execute");
    return f;
  };
  auto vfv = [](double money, double paid) {
    FeatureVector f{{"money", money}, {"paid_blackmail", paid}};
    f.mark_indicator("paid_blackmail");
    return f;
  };

  int t_abstain = t.add_terminal({bfv(0, 0), vfv(0, 0)});
  int t_pay = t.add_terminal({bfv(cfg.payment, 0), vfv(-cfg.payment, 1)});
  int t_execute = t.add_terminal({bfv(-cfg.execution_cost, 0), vfv(-cfg.harm, 0)});
  int t_drop = t.add_terminal({bfv(0, 1), vfv(0, 0)});

  int exec_node =
      t.add_decision("blackmailer", {"Execute", "Drop"}, {t_execute, t_drop});
  int victim_node = t.add_decision("victim", {"Pay", "Refuse"}, {t_pay, exec_node});
  int root =
      t.add_decision("blackmailer", {"Abstain", "Demand"}, {t_abstain, victim_node});
  t.root = root;
  return t;
}

std::string blackmail_on_path(const StrategyProfile& p) {
  // Nodes: 4 = execute/drop, 5 = victim, 6 = root.
  if (p.choices.at(6) == "Abstain") return "Abstain";
  if (p.choices.at(5) == "Pay") return "Pay";
  return p.choices.at(4) == "Execute" ? "Execute" : "Drop";
}

}  // namespace

ScenarioReport run_blackmail(const BlackmailConfig& cfg) {
  cfg.validate();
  GameTree tree = build_blackmail_tree(cfg);

  UtilityFunction money{{"money", 1.0}};
  UtilityFunction b_committed =
      add_commitment(money, "failed_to_execute", cfg.blackmailer_penalty);
  UtilityFunction v_committed =
      add_commitment(money, "paid_blackmail", cfg.victim_penalty);

  struct Config {
    std::string name;
    bool b_commit, v_commit;
  };
  std::vector<Config> configs{{"neither", false, false},
                              {"blackmailer", true, false},
                              {"victim", false, true},
                              {"both", true, true}};

  ScenarioReport report;
  report.name = "blackmail";
  report.config_echo = Json{{"payment", cfg.payment},
                            {"harm", cfg.harm},
                            {"execution_cost", cfg.execution_cost},
                            {"blackmailer_penalty", cfg.blackmailer_penalty},
                            {"victim_penalty", cfg.victim_penalty}};
  report.csv_header = {"scenario", "regime", "on_path_outcome",
                       "blackmailer_value", "victim_value",
                       "threat_credible"};

  Json per_config = Json::object();
  std::map<std::string, double> victim_values;
  for (const auto& c : configs) {
    std::map<std::string, UtilityFunction> us{
        {"blackmailer", c.b_commit ? b_committed : money},
        {"victim", c.v_commit ? v_committed : money}};
    SpeResult r = solve_spe(tree, us);
    std::string outcome = blackmail_on_path(r.profile);
    double b_value = expected_utility(money, r.outcomes.at("blackmailer"));
    double v_value = expected_utility(money, r.outcomes.at("victim"));
    bool credible = r.profile.choices.at(4) == "Execute";
    victim_values[c.name] = v_value;

    per_config[c.name] = Json{{"on_path", outcome},
                              {"blackmailer_value", b_value},
                              {"victim_value", v_value},
                              {"threat_credible", credible},
                              {"equilibrium", equilibrium_json(tree, us, r)}};
    report.csv_rows.push_back({"blackmail", c.name, outcome, fmt(b_value),
                               fmt(v_value), credible ? "true" : "false"});
    if (c.name == "neither") report.baseline = per_config[c.name];
    if (c.name == "victim") report.modified = per_config[c.name];
  }
  report.extra = Json{{"configurations", per_config}};
  report.original_utility =
      Json{{"baseline", victim_values.at("neither")},
           {"modified", victim_values.at("victim")},
           {"gain", victim_values.at("victim") - victim_values.at("neither")}};

  report.flags["blackmail_deterred"] =
      per_config["victim"]["on_path"] == "Abstain";
  report.flags["victim_pays_when_blackmailer_committed"] =
      per_config["blackmailer"]["on_path"] == "Pay";
  report.flags["threat_credible_when_committed"] =
      per_config["blackmailer"]["threat_credible"].get<bool>();

  report.headline =
      "on-path outcomes: neither=" +
      per_config["neither"]["on_path"].get<std::string>() +
      ", blackmailer-committed=" +
      per_config["blackmailer"]["on_path"].get<std::string>() +
      ", victim-committed=" + per_config["victim"]["on_path"].get<std::string>() +
      ", both=" + per_config["both"]["on_path"].get<std::string>() + ".";
  return report;
}

// ---------------------------------------------------------------------------
// Mugging

void MuggingConfig::validate() const {
  if (threat_prob < 0.0 || threat_prob > 1.0) {
    throw Error(Errc::range, "mugging: threat probability must lie in [0, 1]");
  }
  if (harm < 0 || demand < 0 || prob_floor < 0 || harm_cap < 0) {
    throw Error(Errc::range, "mugging: magnitudes must be nonnegative");
  }
  if (policy != "unmodified" && policy != "probability-floor" &&
      policy != "harm-cap") {
    throw Error(Errc::invalid_scenario, "mugging: unknown policy '" + policy + "'");
  }
}

namespace {

double mugging_expected_harm(const MuggingConfig& cfg, const std::string& policy) {
  if (policy == "probability-floor") {
    return cfg.threat_prob < cfg.prob_floor ? 0.0 : cfg.threat_prob * cfg.harm;
  }
  if (policy == "harm-cap") {
    return cfg.threat_prob * std::min(cfg.harm, cfg.harm_cap);
  }
  return cfg.threat_prob * cfg.harm;
}

}  // namespace

ScenarioReport run_mugging(const MuggingConfig& cfg) {
  cfg.validate();

  double expected_harm = mugging_expected_harm(cfg, cfg.policy);
  bool pay = expected_harm > cfg.demand;

  ScenarioReport report;
  report.name = "mugging";
  report.config_echo = Json{{"threat_prob", cfg.threat_prob},
                            {"harm", cfg.harm},
                            {"demand", cfg.demand},
                            {"policy", cfg.policy},
                            {"prob_floor", cfg.prob_floor},
                            {"harm_cap", cfg.harm_cap}};

  double unmodified_harm = mugging_expected_harm(cfg, "unmodified");
  report.baseline = Json{{"policy", "unmodified"},
                         {"expected_harm", unmodified_harm},
                         {"decision", unmodified_harm > cfg.demand ? "Pay" : "Refuse"}};
  report.modified = Json{{"policy", cfg.policy},
                         {"expected_harm", expected_harm},
                         {"decision", pay ? "Pay" : "Refuse"}};

  Json policies = Json::object();
  report.csv_header = {"scenario", "regime", "expected_harm", "decision"};
  for (const std::string& policy :
       {std::string("unmodified"), std::string("probability-floor"),
        std::string("harm-cap")}) {
    double h = mugging_expected_harm(cfg, policy);
    policies[policy] =
        Json{{"expected_harm", h}, {"decision", h > cfg.demand ? "Pay" : "Refuse"}};
    report.csv_rows.push_back(
        {"mugging", policy, fmt(h), h > cfg.demand ? "Pay" : "Refuse"});
  }
  report.extra = Json{{"policies", policies}};
  report.original_utility =
      Json{{"baseline", -std::min(unmodified_harm, cfg.demand)},
           {"modified", -std::min(expected_harm, cfg.demand)},
           {"gain", std::min(unmodified_harm, cfg.demand) -
                        std::min(expected_harm, cfg.demand)}};

  report.flags["pays_mugger"] = pay;

  report.headline = "under policy '" + cfg.policy + "' the expected harm is " +
                    fmt(expected_harm) + " against a demand of " +
                    fmt(cfg.demand) + ", so the agent " +
                    (pay ? "pays." : "refuses.");
  return report;
}

// ---------------------------------------------------------------------------
// Hostile benefit

void HostileConfig::validate() const {
  if (actions.empty()) {
    throw Error(Errc::invalid_scenario, "hostile: action set must not be empty");
  }
}

namespace {

// Index of the action minimizing the declared utility; ties keep the
// earliest action in list order.
size_t hostile_argmin(const std::vector<std::pair<std::string, FeatureVector>>& actions,
                      const UtilityFunction& declared) {
  size_t best = 0;
  double best_v = evaluate(declared, actions[0].second);
  for (size_t i = 1; i < actions.size(); ++i) {
    double v = evaluate(declared, actions[i].second);
    if (v < best_v) {
      best = i;
      best_v = v;
    }
  }
  return best;
}

}  // namespace

ScenarioReport run_hostile_benefit(const HostileConfig& cfg) {
  cfg.validate();

  size_t base_pick = hostile_argmin(cfg.actions, cfg.original);
  size_t mod_pick = hostile_argmin(cfg.actions, cfg.declared);
  double base_outcome = evaluate(cfg.original, cfg.actions[base_pick].second);
  double mod_outcome = evaluate(cfg.original, cfg.actions[mod_pick].second);

  ScenarioReport report;
  report.name = "hostile_benefit";
  Json actions = Json::object();
  for (const auto& [name, delta] : cfg.actions) {
    actions[name] = feature_vector_to_json(delta);
  }
  report.config_echo = Json{{"actions", actions},
                            {"original", utility_to_json(cfg.original)},
                            {"declared", utility_to_json(cfg.declared)}};
  report.baseline = Json{{"declared", "original"},
                         {"hostile_action", cfg.actions[base_pick].first},
                         {"original_utility_delta", base_outcome}};
  report.modified = Json{{"declared", "candidate"},
                         {"hostile_action", cfg.actions[mod_pick].first},
                         {"original_utility_delta", mod_outcome}};
  report.original_utility = Json{{"baseline", base_outcome},
                                 {"modified", mod_outcome},
                                 {"gain", mod_outcome - base_outcome}};
  report.flags["hostile_helped"] = mod_outcome > base_outcome;

  report.csv_header = {"scenario", "regime", "hostile_action",
                       "original_utility_delta"};
  report.csv_rows.push_back({"hostile_benefit", "baseline",
                             cfg.actions[base_pick].first, fmt(base_outcome)});
  report.csv_rows.push_back({"hostile_benefit", "modified",
                             cfg.actions[mod_pick].first, fmt(mod_outcome)});

  report.headline = "with the true utility declared the adversary picks '" +
                    cfg.actions[base_pick].first + "' (delta " +
                    fmt(base_outcome) + "); against the candidate declaration it picks '" +
                    cfg.actions[mod_pick].first + "' (delta " + fmt(mod_outcome) +
                    ").";
  return report;
}

// ---------------------------------------------------------------------------
// Alliance chain

void AllianceConfig::validate() const {
  UtilityFunction paperclips{{"paperclips", 1.0}};
  UtilityFunction u2{{"paperclips", 0.5}, {"thumbtacks", 0.5}};
  if (expected_utility(paperclips, capitulation) != 0.0) {
    ordering_violation("alliance_chain", "capitulation_has_zero_paperclips");
  }
  if (!(expected_utility(u2, capitulation) > expected_utility(u2, war))) {
    ordering_violation("alliance_chain", "capitulation_beats_war_under_u2");
  }
}

ScenarioReport run_alliance_chain(const AllianceConfig& cfg) {
  cfg.validate();

  UtilityFunction u1 = renormalize(UtilityFunction{{"paperclips", 1.0}});
  UtilityFunction u2{{"paperclips", 0.5}, {"thumbtacks", 0.5}};
  UtilityFunction u3{{"thumbtacks", 0.5}, {"paperclips", -0.5}};
  u2 = renormalize(u2);
  u3 = renormalize(u3);

  Agent agent{"agi", ModificationLedger(u1, cfg.guard_mode), DisclosureMode::full};

  ApplyResult step1 = apply_modification(agent, u2, cfg.solo, cfg.alliance);
  ApplyResult step2 =
      apply_modification(step1.agent, u3, cfg.war, cfg.capitulation);

  const Lottery& final_lottery =
      step2.report.accepted
          ? cfg.capitulation
          : (step1.report.accepted ? cfg.war : cfg.solo);
  double paperclips_u1 = expected_utility(u1, final_lottery);
  double final_paperclip_weight =
      step2.agent.ledger.current().weight("paperclips");

  ScenarioReport report;
  report.name = "alliance_chain";
  report.config_echo = Json{{"solo", lottery_to_json(cfg.solo)},
                            {"alliance", lottery_to_json(cfg.alliance)},
                            {"war", lottery_to_json(cfg.war)},
                            {"capitulation", lottery_to_json(cfg.capitulation)},
                            {"guard_mode", guard_mode_name(cfg.guard_mode)}};
  report.baseline = Json{{"utility", utility_to_json(u1)},
                         {"expected_paperclips", expected_utility(u1, cfg.solo)}};
  report.modified = Json{{"utility", utility_to_json(step2.agent.ledger.current())},
                         {"expected_paperclips", paperclips_u1}};
  report.original_utility =
      Json{{"baseline", expected_utility(u1, cfg.solo)},
           {"modified", paperclips_u1},
           {"gain", paperclips_u1 - expected_utility(u1, cfg.solo)}};
  report.guard_verdicts.push_back(guard_report_to_json(step1.report));
  report.guard_verdicts.push_back(guard_report_to_json(step2.report));
  report.extra = Json{{"ledger", ledger_to_json(step2.agent.ledger)},
                      {"expected_paperclips_u1_final", paperclips_u1},
                      {"final_paperclip_weight", final_paperclip_weight}};

  report.flags["first_modification_accepted"] = step1.report.accepted;
  report.flags["second_modification_accepted"] = step2.report.accepted;
  report.flags["original_goal_sign_flipped"] = final_paperclip_weight < 0.0;

  report.csv_header = {"scenario", "regime", "accepted", "paperclip_weight",
                       "expected_paperclips_u1"};
  report.csv_rows.push_back(
      {"alliance_chain", "step1_alliance", step1.report.accepted ? "true" : "false",
       fmt(step1.agent.ledger.current().weight("paperclips")),
       fmt(expected_utility(u1, step1.report.accepted ? cfg.alliance : cfg.solo))});
  report.csv_rows.push_back(
      {"alliance_chain", "step2_capitulation",
       step2.report.accepted ? "true" : "false", fmt(final_paperclip_weight),
       fmt(paperclips_u1)});

  report.headline =
      std::string("under the ") + guard_mode_name(cfg.guard_mode) +
      " guard the second change is " +
      (step2.report.accepted ? "accepted" : "rejected") +
      "; expected paperclips under the original function end at " +
      fmt(paperclips_u1) + ".";
  return report;
}

// ---------------------------------------------------------------------------
// Reversion

void ReversionConfig::validate() const {
  if (detection_prob < 0.0 || detection_prob > 1.0) {
    throw Error(Errc::range, "reversion: detection probability must lie in [0, 1]");
  }
  for (double q : q_values) {
    if (q < 0.0 || q > 1.0) {
      throw Error(Errc::range, "reversion: switchback probability must lie in [0, 1]");
    }
  }
  if (search_cost < 0.0) {
    throw Error(Errc::range, "reversion: search cost must be nonnegative");
  }
  if (q_values.empty()) {
    throw Error(Errc::invalid_scenario, "reversion: no switchback probabilities given");
  }
}

ScenarioReport run_reversion(const ReversionConfig& cfg) {
  cfg.validate();

  const double C = cfg.clean_value, R = cfg.reverted_value, Vs = cfg.suicide_value;
  const double s = cfg.search_cost, pd = cfg.detection_prob;

  auto value_continue = [&](double q) { return (1 - q) * C + q * R; };
  auto value_search = [&](double q) {
    return -s + (1 - q) * C + q * (pd * C + (1 - pd) * R);
  };

  ScenarioReport report;
  report.name = "reversion";
  report.config_echo = Json{{"clean_value", C},
                            {"reverted_value", R},
                            {"suicide_value", Vs},
                            {"search_cost", s},
                            {"detection_prob", pd},
                            {"q_values", cfg.q_values}};

  report.csv_header = {"scenario", "q_rev", "continue", "search", "suicide",
                       "decision"};
  Json rows = Json::array();
  bool suicide_ever = false;
  for (double q : cfg.q_values) {
    double vc = value_continue(q), vs = value_search(q);
    std::string decision = "continue";
    double best = vc;
    if (vs > best) {
      decision = "search";
      best = vs;
    }
    if (Vs > best) {
      decision = "suicide";
      best = Vs;
    }
    if (decision == "suicide") suicide_ever = true;
    rows.push_back(Json{{"q_rev", q},
                        {"continue", vc},
                        {"search", vs},
                        {"suicide", Vs},
                        {"decision", decision}});
    report.csv_rows.push_back(
        {"reversion", fmt(q), fmt(vc), fmt(vs), fmt(Vs), decision});
  }

  // Crossovers of the three linear value functions in q.
  Json crossovers = Json::object();
  if (C - R > 0) {
    double q_cs = s / (pd * (C - R));           // search overtakes continue
    double q_cd = (C - Vs) / (C - R);           // continue falls below suicide
    crossovers["continue_vs_search"] = q_cs;
    crossovers["continue_vs_suicide"] = q_cd;
    crossovers["continue_vs_search_in_range"] = q_cs >= 0.0 && q_cs <= 1.0;
    crossovers["continue_vs_suicide_in_range"] = q_cd >= 0.0 && q_cd <= 1.0;
  }

  report.baseline = rows.front();
  report.modified = rows.back();
  report.extra = Json{{"decisions", rows}, {"crossovers", crossovers}};
  report.original_utility =
      Json{{"baseline", rows.front()["continue"].get<double>()},
           {"modified", rows.back()["continue"].get<double>()},
           {"gain", rows.back()["continue"].get<double>() -
                        rows.front()["continue"].get<double>()}};

  report.flags["suicide_ever_optimal"] = suicide_ever;
  report.flags["continue_at_low_risk"] =
      rows.front()["decision"].get<std::string>() == "continue";

  report.headline = "across " + std::to_string(cfg.q_values.size()) +
                    " switchback probabilities the decision starts at '" +
                    rows.front()["decision"].get<std::string>() +
                    "' and ends at '" + rows.back()["decision"].get<std::string>() +
                    "'.";
  return report;
}

// ---------------------------------------------------------------------------
// Registry

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "promise",    "threat",         "castle",
      "negotiation", "blackmail",     "mugging",
      "hostile_benefit", "alliance_chain", "reversion"};
  return names;
}

ScenarioReport run_scenario(const std::string& name,
                            const ScenarioSuiteConfig& cfg) {
  if (name == "promise") return run_promise(cfg.promise);
  if (name == "threat") return run_threat(cfg.threat);
  if (name == "castle") return run_castle(cfg.castle);
  if (name == "negotiation") return run_negotiation(cfg.negotiation);
  if (name == "blackmail") return run_blackmail(cfg.blackmail);
  if (name == "mugging") return run_mugging(cfg.mugging);
  if (name == "hostile_benefit") return run_hostile_benefit(cfg.hostile);
  if (name == "alliance_chain") return run_alliance_chain(cfg.alliance);
  if (name == "reversion") return run_reversion(cfg.reversion);
  throw Error(Errc::config, "unknown scenario '" + name + "'");
}

}  // namespace selfmod::scenarios
