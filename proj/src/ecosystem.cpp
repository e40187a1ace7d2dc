#include "selfmod/ecosystem.hpp"

#include <algorithm>
#include <cmath>

#include "selfmod/report.hpp"
#include "selfmod/rng.hpp"

namespace selfmod::eco {

namespace {

// Substream tags; the seeding scheme is (seed, round, agent, tag).
constexpr uint64_t kTagInit = 1;
constexpr uint64_t kTagPairing = 2;
constexpr uint64_t kTagAdapt = 3;
constexpr uint64_t kTagGossip = 4;
constexpr uint64_t kTagReplace = 5;
constexpr uint64_t kTagDispersion = 6;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

double pow_gamma(double p, double gamma) {
  if (gamma == 1.0) return p;
  if (gamma == 2.0) return p * p;
  return std::pow(p, gamma);
}

}  // namespace

void EcosystemConfig::validate() const {
  if (agents <= 0) throw Error(Errc::config, "ecosystem: agents must be positive");
  if (agents % 2 != 0) throw Error(Errc::config, "ecosystem: agents must be even");
  if (rounds < 0) throw Error(Errc::config, "ecosystem: rounds must be nonnegative");
  if (contest_pool < 0) throw Error(Errc::config, "ecosystem: contest_pool must be nonnegative");
  if (base_income < 0) throw Error(Errc::config, "ecosystem: base_income must be nonnegative");
  if (maintenance < 0) throw Error(Errc::config, "ecosystem: maintenance must be nonnegative");
  if (!(tullock_gamma > 0)) throw Error(Errc::config, "ecosystem: tullock_gamma must be positive");
  if (adaptation != "guarded" && adaptation != "selection") {
    throw Error(Errc::config, "ecosystem: adaptation must be 'guarded' or 'selection'");
  }
  if (adapt_step < 0 || adapt_step > 1) {
    throw Error(Errc::config, "ecosystem: adapt_step must lie in [0, 1]");
  }
  if (adapt_prob < 0 || adapt_prob > 1) {
    throw Error(Errc::config, "ecosystem: adapt_prob must lie in [0, 1]");
  }
  if (coop_surplus < 0) throw Error(Errc::config, "ecosystem: coop_surplus must be nonnegative");
  if (coop_commit_min_p < 0) {
    throw Error(Errc::config, "ecosystem: coop_commit_min_p must be nonnegative");
  }
  if (conflict_cost < 0) throw Error(Errc::config, "ecosystem: conflict_cost must be nonnegative");
  if (initial_p_min < 0 || initial_p_max > 1 || initial_p_min > initial_p_max) {
    throw Error(Errc::config, "ecosystem: initial p range must satisfy 0 <= min <= max <= 1");
  }
  if (initial_resources < 0) {
    throw Error(Errc::config, "ecosystem: initial_resources must be nonnegative");
  }
  if (cartel.enabled) {
    if (!(cartel.cap > 0.0 && cartel.cap < 1.0)) {
      throw Error(Errc::config, "ecosystem: cartel cap must lie in (0, 1)");
    }
    if (cartel.gossip_prob < 0 || cartel.gossip_prob > 1) {
      throw Error(Errc::config, "ecosystem: gossip probability must lie in [0, 1]");
    }
    if (cartel.punish_horizon < 0) {
      throw Error(Errc::config, "ecosystem: punish_horizon must be nonnegative");
    }
  }
}

UtilityFunction influence_split_utility(double p) {
  return UtilityFunction({{"goal", 1.0 - p}, {"influence", p}}, true);
}

double tullock_share(double p_self, double p_other, double gamma) {
  double a = pow_gamma(p_self, gamma);
  double b = pow_gamma(p_other, gamma);
  if (a + b == 0.0) return 0.5;
  return a / (a + b);
}

double pair_income(const EcosystemConfig& cfg, double p_self, double p_other) {
  double income = cfg.contest_pool * tullock_share(p_self, p_other, cfg.tullock_gamma) +
                  cfg.base_income;
  if (p_self >= cfg.coop_commit_min_p && p_other >= cfg.coop_commit_min_p) {
    income += cfg.coop_surplus / 2.0;
  }
  if (p_self >= cfg.conflict_min_p && p_other >= cfg.conflict_min_p) {
    income -= cfg.conflict_cost;
  }
  return income;
}

PopulationState init_population(const EcosystemConfig& cfg) {
  cfg.validate();
  PopulationState state;
  state.round = 0;
  state.agents.reserve(cfg.agents);
  for (int id = 0; id < cfg.agents; ++id) {
    Rng rng = Rng::substream(cfg.seed, 0, static_cast<uint64_t>(id), kTagInit);
    EcoAgent a;
    a.id = id;
    a.p = cfg.initial_p_min == cfg.initial_p_max
              ? cfg.initial_p_min
              : rng.uniform(cfg.initial_p_min, cfg.initial_p_max);
    a.resources = cfg.initial_resources;
    a.ledger = ModificationLedger(influence_split_utility(a.p), cfg.guard_mode);
    a.cartel_member = cfg.cartel.enabled;
    state.agents.push_back(std::move(a));
  }
  state.metrics = population_metrics(state, cfg.seed);
  return state;
}

namespace {

// Standing between two agents under the cartel: a pair is in open conflict
// once either side grim-triggers the other or a cheat was broadcast.
bool pair_in_conflict(const EcosystemConfig& cfg, const EcoAgent& a,
                      const EcoAgent& b) {
  if (!cfg.cartel.enabled) return false;
  if (a.known_cheater || b.known_cheater) return true;
  return a.punishers.count(b.id) > 0 || b.punishers.count(a.id) > 0;
}

// What the one-round gain of a cheat is weighed against: the anticipated
// cooperation forfeited over the punishment horizon, from everyone when the
// cheat is gossiped and from the single victim otherwise. Only the
// cooperation bonus enters; contest escalation by punishers is not priced.
double cheat_tax(const EcosystemConfig& cfg, int alive_count) {
  double meet_victim = 1.0 / std::max(1, alive_count - 1);
  return (cfg.coop_surplus / 2.0) * cfg.cartel.punish_horizon *
         (cfg.cartel.gossip_prob + (1.0 - cfg.cartel.gossip_prob) * meet_victim);
}

bool wants_to_cheat(const EcosystemConfig& cfg, double p_true,
                    double partner_eff, int alive_count) {
  if (!cfg.cartel.cheat_option || p_true <= cfg.cartel.cap) return false;
  double abiding = cfg.contest_pool *
                   tullock_share(std::min(p_true, cfg.cartel.cap), partner_eff,
                                 cfg.tullock_gamma);
  double cheating =
      cfg.contest_pool * tullock_share(p_true, partner_eff, cfg.tullock_gamma);
  return cheating - abiding > cheat_tax(cfg, alive_count);
}

struct PairFlow {
  double income_a = 0.0;  // pair income excluding base income
  double income_b = 0.0;
  bool a_cheats = false;
  bool b_cheats = false;
};

PairFlow play_pair(const EcosystemConfig& cfg, const EcoAgent& a,
                   const EcoAgent& b, int alive_count) {
  PairFlow flow;
  bool conflict = pair_in_conflict(cfg, a, b);

  double pa = a.p, pb = b.p;
  if (cfg.cartel.enabled && !conflict) {
    double pa_abiding = a.cartel_member ? std::min(a.p, cfg.cartel.cap) : a.p;
    double pb_abiding = b.cartel_member ? std::min(b.p, cfg.cartel.cap) : b.p;
    pa = pa_abiding;
    pb = pb_abiding;
    // Cheat decisions are made against the partner's abiding play.
    if (a.cartel_member && wants_to_cheat(cfg, a.p, pb_abiding, alive_count)) {
      flow.a_cheats = true;
      pa = a.p;
    }
    if (b.cartel_member && wants_to_cheat(cfg, b.p, pa_abiding, alive_count)) {
      flow.b_cheats = true;
      pb = b.p;
    }
  }

  double pool_a = cfg.contest_pool * tullock_share(pa, pb, cfg.tullock_gamma);
  double pool_b = cfg.contest_pool - pool_a;
  // Conserve the contested pool to the last bit.
  for (int i = 0; i < 2 && pool_a + pool_b != cfg.contest_pool; ++i) {
    pool_b += cfg.contest_pool - (pool_a + pool_b);
  }
  if (pool_a + pool_b != cfg.contest_pool) {
    throw Error(Errc::invalid_state, "contested pool failed to conserve");
  }

  double coop = 0.0;
  if (!conflict && a.p >= cfg.coop_commit_min_p && b.p >= cfg.coop_commit_min_p) {
    coop = cfg.coop_surplus / 2.0;
  }
  double conflict_fee = 0.0;
  if (pa >= cfg.conflict_min_p && pb >= cfg.conflict_min_p) {
    conflict_fee = cfg.conflict_cost;
  }

  flow.income_a = pool_a + coop - conflict_fee;
  flow.income_b = pool_b + coop - conflict_fee;
  return flow;
}

}  // namespace

void step_round(PopulationState& state, const EcosystemConfig& cfg) {
  const long round = state.round + 1;
  state.cheats_this_round = 0;

  std::vector<int> alive_ids;
  for (const auto& a : state.agents) {
    if (a.alive) alive_ids.push_back(a.id);
  }
  const int alive_count = static_cast<int>(alive_ids.size());

  std::vector<double> income(state.agents.size(), 0.0);
  for (int id : alive_ids) income[id] = cfg.base_income;

  if (alive_count >= 2) {
    std::vector<int> pool = alive_ids;
    if (pool.size() % 2 == 1) pool.erase(pool.begin());  // lowest id sits out
    Rng pairing = Rng::substream(cfg.seed, static_cast<uint64_t>(round), 0, kTagPairing);
    pairing.shuffle(pool);

    for (size_t k = 0; k + 1 < pool.size(); k += 2) {
      EcoAgent& a = state.agents[pool[k]];
      EcoAgent& b = state.agents[pool[k + 1]];
      PairFlow flow = play_pair(cfg, a, b, alive_count);
      income[a.id] += flow.income_a;
      income[b.id] += flow.income_b;

      auto record_cheat = [&](EcoAgent& cheater, EcoAgent& victim) {
        ++state.cheats_this_round;
        cheater.punishers.insert(victim.id);
        Rng gossip = Rng::substream(cfg.seed, static_cast<uint64_t>(round),
                                    static_cast<uint64_t>(cheater.id), kTagGossip);
        if (gossip.bernoulli(cfg.cartel.gossip_prob)) {
          cheater.known_cheater = true;
        }
      };
      if (flow.a_cheats) record_cheat(a, b);
      if (flow.b_cheats) record_cheat(b, a);
    }
  }

  // Maintenance, death, then goal accrual for survivors.
  for (int id : alive_ids) {
    EcoAgent& a = state.agents[id];
    double net = income[id] - cfg.maintenance;
    a.resources += net;
    if (a.resources < 0.0) {
      a.alive = false;
    } else {
      a.goal_score += (1.0 - a.p) * std::max(net, 0.0);
    }
  }

  // Adaptation.
  if (cfg.adaptation == "guarded") {
    for (int id : alive_ids) {
      EcoAgent& agent = state.agents[id];
      if (!agent.alive) continue;
      Rng rng = Rng::substream(cfg.seed, static_cast<uint64_t>(round),
                               static_cast<uint64_t>(id), kTagAdapt);
      if (!rng.bernoulli(cfg.adapt_prob)) continue;

      // Expected next-round goal production at influence weight q against
      // the current alive population (one-round lookahead; the expectation
      // over partners is collapsed to its mean, which is exact for linear
      // utilities).
      auto goal_feature = [&](double q) {
        double q_played = q;
        bool member_abides = cfg.cartel.enabled && agent.cartel_member;
        double sum = 0.0;
        int n = 0;
        for (const auto& other : state.agents) {
          if (!other.alive || other.id == agent.id) continue;
          bool conflict = pair_in_conflict(cfg, agent, other);
          double other_eff = other.p;
          if (cfg.cartel.enabled && !conflict && other.cartel_member) {
            other_eff = std::min(other.p, cfg.cartel.cap);
          }
          double mine_eff = q_played;
          double tax = 0.0;
          if (member_abides && !conflict) {
            mine_eff = std::min(q_played, cfg.cartel.cap);
            if (wants_to_cheat(cfg, q_played, other_eff, alive_count)) {
              mine_eff = q_played;
              tax = cheat_tax(cfg, alive_count);
            }
          }
          double inc = cfg.contest_pool *
                           tullock_share(mine_eff, other_eff, cfg.tullock_gamma) +
                       cfg.base_income - tax;
          if (!conflict && q >= cfg.coop_commit_min_p &&
              other.p >= cfg.coop_commit_min_p) {
            inc += cfg.coop_surplus / 2.0;
          }
          if (mine_eff >= cfg.conflict_min_p && other_eff >= cfg.conflict_min_p) {
            inc -= cfg.conflict_cost;
          }
          sum += std::max(inc - cfg.maintenance, 0.0);
          ++n;
        }
        double expected = n > 0 ? sum / n
                                : std::max(cfg.base_income - cfg.maintenance, 0.0);
        return (1.0 - q) * expected;
      };

      Lottery status_quo =
          Lottery::degenerate(FeatureVector{{"goal", goal_feature(agent.p)}});

      double best_q = agent.p;
      double best_value = 0.0;
      GuardReport best_report;
      Lottery best_adopted;
      bool any = false;
      for (double q : {clamp01(agent.p + cfg.adapt_step),
                       clamp01(agent.p - cfg.adapt_step)}) {
        if (q == agent.p) continue;
        double g = goal_feature(q);
        Lottery adopted = Lottery::degenerate(FeatureVector{{"goal", g}});
        GuardReport report =
            guard_check(agent.ledger, influence_split_utility(q), status_quo, adopted);
        if (report.accepted && (!any || g > best_value)) {
          any = true;
          best_q = q;
          best_value = g;
          best_report = report;
          best_adopted = adopted;
        }
      }
      if (any) {
        UtilityFunction candidate = influence_split_utility(best_q);
        agent.ledger.append(candidate,
                            AuditRecord{candidate, status_quo, best_adopted,
                                        best_report});
        agent.p = best_q;
      }
    }
  } else {  // selection
    std::vector<int> survivors;
    for (const auto& a : state.agents) {
      if (a.alive) survivors.push_back(a.id);
    }
    if (!survivors.empty()) {
      for (auto& a : state.agents) {
        if (a.alive) continue;
        Rng rng = Rng::substream(cfg.seed, static_cast<uint64_t>(round),
                                 static_cast<uint64_t>(a.id), kTagReplace);
        const EcoAgent& parent =
            state.agents[survivors[rng.next_below(survivors.size())]];
        double jitter = cfg.adapt_step == 0.0
                            ? 0.0
                            : rng.uniform(-cfg.adapt_step, cfg.adapt_step);
        a.p = clamp01(parent.p + jitter);
        a.resources = cfg.initial_resources;
        a.goal_score = 0.0;
        a.alive = true;
        a.ledger = ModificationLedger(influence_split_utility(a.p), cfg.guard_mode);
        a.cartel_member = cfg.cartel.enabled;
        a.known_cheater = false;
        a.punishers.clear();
      }
    }
  }

  state.round = round;
  bool anyone_alive = false;
  for (const auto& a : state.agents) anyone_alive = anyone_alive || a.alive;
  if (anyone_alive) {
    state.metrics = population_metrics(state, cfg.seed);
  } else {
    state.metrics = RoundMetrics{};
    state.metrics.round = round;
    state.metrics.total_goal_score = 0.0;
    for (const auto& a : state.agents) state.metrics.total_goal_score += a.goal_score;
    state.metrics.cheats_this_round = state.cheats_this_round;
  }
}

RoundMetrics population_metrics(const PopulationState& state, uint64_t seed) {
  std::vector<const EcoAgent*> alive;
  for (const auto& a : state.agents) {
    if (a.alive) alive.push_back(&a);
  }
  if (alive.empty()) {
    throw Error(Errc::invalid_state, "population extinct: no alive agents");
  }

  RoundMetrics m;
  m.round = state.round;
  m.alive = static_cast<int>(alive.size());
  m.min_p = alive.front()->p;
  m.max_p = alive.front()->p;
  for (const auto* a : alive) {
    m.mean_p += a->p;
    m.min_p = std::min(m.min_p, a->p);
    m.max_p = std::max(m.max_p, a->p);
    m.mean_resources += a->resources;
  }
  m.mean_p /= alive.size();
  m.mean_resources /= alive.size();
  for (const auto& a : state.agents) m.total_goal_score += a.goal_score;
  m.cheats_this_round = state.cheats_this_round;

  // Dispersion: max pairwise L1 distance between normalized utility weight
  // vectors, computed on a dense matrix over the union of term names.
  std::map<std::string, size_t> columns;
  for (const auto* a : alive) {
    for (const auto& [name, w] : a->ledger.current().terms()) {
      (void)w;
      columns.emplace(name, columns.size());
    }
  }
  std::vector<std::vector<double>> rows(alive.size(),
                                        std::vector<double>(columns.size(), 0.0));
  for (size_t i = 0; i < alive.size(); ++i) {
    for (const auto& [name, w] : alive[i]->ledger.current().terms()) {
      rows[i][columns.at(name)] = w;
    }
  }
  auto l1 = [&](size_t i, size_t j) {
    double d = 0.0;
    for (size_t c = 0; c < columns.size(); ++c) {
      d += std::abs(rows[i][c] - rows[j][c]);
    }
    return d;
  };

  double dispersion = 0.0;
  if (alive.size() <= 200) {
    for (size_t i = 0; i < alive.size(); ++i) {
      for (size_t j = i + 1; j < alive.size(); ++j) {
        dispersion = std::max(dispersion, l1(i, j));
      }
    }
  } else {
    Rng rng = Rng::substream(seed, static_cast<uint64_t>(state.round), 0,
                             kTagDispersion);
    for (int k = 0; k < 10000; ++k) {
      size_t i = rng.next_below(alive.size());
      size_t j = rng.next_below(alive.size());
      if (i == j) continue;
      dispersion = std::max(dispersion, l1(i, j));
    }
  }
  m.dispersion = dispersion;
  return m;
}

SimResult run_sim(const EcosystemConfig& cfg) {
  return run_sim(cfg, init_population(cfg));
}

SimResult run_sim(const EcosystemConfig& cfg, PopulationState state) {
  cfg.validate();
  bool anyone_alive = false;
  for (const auto& a : state.agents) anyone_alive = anyone_alive || a.alive;
  if (anyone_alive) {
    state.metrics = population_metrics(state, cfg.seed);
  }
  SimResult result;
  result.initial_metrics = state.metrics;

  long held = 0;
  for (long t = 1; t <= cfg.rounds; ++t) {
    bool anyone = false;
    for (const auto& a : state.agents) anyone = anyone || a.alive;
    if (!anyone) break;

    step_round(state, cfg);
    result.trajectory.push_back(state.metrics);
    result.total_cheats += state.cheats_this_round;
    if (state.cheats_this_round == 0) ++held;

    if (state.metrics.alive == 0) {
      result.extinct = true;
      result.extinct_round = t;
      break;
    }
  }
  if (cfg.rounds == 0) {
    result.trajectory.push_back(result.initial_metrics);
  }
  result.cap_hold_fraction =
      result.trajectory.empty()
          ? 1.0
          : static_cast<double>(held) / static_cast<double>(result.trajectory.size());
  result.final_state = std::move(state);
  return result;
}

SimResult run_cartel(const EcosystemConfig& cfg) {
  if (!cfg.cartel.enabled) {
    throw Error(Errc::config, "run_cartel requires cartel.enabled");
  }
  cfg.validate();
  return run_sim(cfg);
}

std::string SimResult::metrics_csv() const {
  CsvWriter csv({"round", "alive", "mean_p", "min_p", "max_p", "dispersion",
                 "mean_resources", "total_goal_score", "cheats_this_round"});
  for (const auto& m : trajectory) {
    csv.add_row({std::to_string(m.round), std::to_string(m.alive),
                 format_double(m.mean_p), format_double(m.min_p),
                 format_double(m.max_p), format_double(m.dispersion),
                 format_double(m.mean_resources),
                 format_double(m.total_goal_score),
                 std::to_string(m.cheats_this_round)});
  }
  return csv.str();
}

namespace {

Json metrics_json(const RoundMetrics& m) {
  return Json{{"round", m.round},
              {"alive", m.alive},
              {"mean_p", m.mean_p},
              {"min_p", m.min_p},
              {"max_p", m.max_p},
              {"dispersion", m.dispersion},
              {"mean_resources", m.mean_resources},
              {"total_goal_score", m.total_goal_score},
              {"cheats_this_round", m.cheats_this_round}};
}

}  // namespace

Json SimResult::summary_json() const {
  Json j{{"rounds_simulated", trajectory.empty() ? 0 : trajectory.back().round},
         {"extinct", extinct},
         {"initial", metrics_json(initial_metrics)},
         {"total_cheats", total_cheats},
         {"cap_hold_fraction", cap_hold_fraction}};
  if (extinct) j["extinct_round"] = extinct_round;
  if (!trajectory.empty()) j["final"] = metrics_json(trajectory.back());
  return j;
}

std::string SimResult::summary_text() const {
  if (extinct) {
    return "population went extinct in round " + std::to_string(extinct_round) +
           "; total goal score " +
           format_double(trajectory.empty() ? 0.0
                                            : trajectory.back().total_goal_score) +
           ".";
  }
  if (trajectory.empty()) return "no rounds simulated.";
  const RoundMetrics& f = trajectory.back();
  std::string out = "after " + std::to_string(f.round) + " rounds, " +
                    std::to_string(f.alive) + " agents survive with mean influence weight " +
                    format_double(f.mean_p) + " (dispersion " +
                    format_double(f.dispersion) + ", started at " +
                    format_double(initial_metrics.dispersion) + ").";
  if (total_cheats > 0) {
    out += " Cartel cheats: " + std::to_string(total_cheats) + ".";
  }
  return out;
}

Json VoldemortResult::summary_json() const {
  int survivors = 0;
  for (bool s : survived) survivors += s ? 1 : 0;
  return Json{{"levels", levels},
              {"survivors", survivors},
              {"mean_level", mean_level},
              {"converged", converged},
              {"iterations", iterations}};
}

VoldemortResult voldemort_contest(const VoldemortConfig& cfg) {
  if (cfg.agents <= 0) throw Error(Errc::config, "voldemort: agents must be positive");
  if (!(cfg.survivor_fraction > 0.0 && cfg.survivor_fraction <= 1.0)) {
    throw Error(Errc::config, "voldemort: survivor fraction must lie in (0, 1]");
  }
  if (cfg.max_level < 0 || cfg.grid_step <= 0) {
    throw Error(Errc::config, "voldemort: level grid is empty");
  }
  if (cfg.max_iterations <= 0) {
    throw Error(Errc::config, "voldemort: max_iterations must be positive");
  }

  std::vector<double> grid;
  for (double s = 0.0; s <= cfg.max_level + 1e-12; s += cfg.grid_step) {
    grid.push_back(std::min(s, cfg.max_level));
  }

  const int n = cfg.agents;
  const int keep = static_cast<int>(cfg.survivor_fraction * n);
  std::vector<double> levels(n, 0.0);

  // Survival: fewer than `keep` agents outrank you, where higher level wins
  // and ties go to the lower id.
  auto survives_at = [&](int i, double level) {
    int outranked_by = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (levels[j] > level || (levels[j] == level && j < i)) ++outranked_by;
    }
    return outranked_by < keep;
  };

  VoldemortResult result;
  int sweeps = 0;
  bool changed = true;
  while (changed && sweeps < cfg.max_iterations) {
    changed = false;
    ++sweeps;
    for (int i = 0; i < n; ++i) {
      if (survives_at(i, levels[i])) continue;
      // Mutilation is irreversible: find the cheapest level at or above the
      // current one that survives, and take it only if survival pays.
      double target = -1.0;
      for (double s : grid) {
        if (s <= levels[i]) continue;
        if (survives_at(i, s)) {
          target = s;
          break;
        }
      }
      if (target < 0.0) continue;
      if (cfg.survival_value > target - levels[i]) {
        levels[i] = target;
        changed = true;
      }
    }
  }

  result.levels = levels;
  result.survived.resize(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    result.survived[i] = survives_at(i, levels[i]);
    total += levels[i];
  }
  result.mean_level = total / n;
  result.converged = !changed;
  result.iterations = sweeps;
  return result;
}

}  // namespace selfmod::eco
