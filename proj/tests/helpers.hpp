#pragma once

// Shared generators for property tests. Everything is built from dyadic
// rationals (k / 2^n) so expected utilities are exact in floating point and
// the two solver routes can be compared bit for bit.

#include <string>
#include <vector>

#include "selfmod/game_tree.hpp"
#include "selfmod/rng.hpp"
#include "selfmod/utility.hpp"

namespace testgen {

inline double dyadic(selfmod::Rng& rng, int max_num, int denom_pow) {
  int64_t span = 2 * static_cast<int64_t>(max_num) + 1;
  int64_t k = static_cast<int64_t>(rng.next_below(span)) - max_num;
  return static_cast<double>(k) / static_cast<double>(1 << denom_pow);
}

inline const std::vector<std::string>& feature_pool() {
  static const std::vector<std::string> pool{"f0", "f1", "f2", "f3"};
  return pool;
}

inline selfmod::FeatureVector random_features(selfmod::Rng& rng) {
  selfmod::FeatureVector f;
  for (const auto& name : feature_pool()) {
    if (rng.next_below(4) < 3) f.set(name, dyadic(rng, 64, 3));
  }
  if (f.size() == 0) f.set("f0", dyadic(rng, 64, 3));
  return f;
}

inline selfmod::UtilityFunction random_utility(selfmod::Rng& rng) {
  std::vector<selfmod::UtilityFunction::Term> terms;
  for (const auto& name : feature_pool()) {
    terms.emplace_back(name, dyadic(rng, 8, 2));
  }
  return selfmod::UtilityFunction(std::move(terms));
}

inline selfmod::UtilityFunction random_normalized_utility(selfmod::Rng& rng) {
  while (true) {
    selfmod::UtilityFunction u = random_utility(rng);
    double sum = 0.0;
    for (const auto& t : u.terms()) sum += t.second < 0 ? -t.second : t.second;
    if (sum > 0.0) return renormalize(u);
  }
}

struct TreeGen {
  selfmod::Rng rng;
  int decision_budget;
  int max_depth;
  selfmod::GameTree tree;

  TreeGen(uint64_t seed, int budget, int players, int depth = 5)
      : rng(seed), decision_budget(budget), max_depth(depth) {
    for (int p = 0; p < players; ++p) {
      tree.players.push_back("player" + std::to_string(p));
    }
  }

  int gen_terminal() {
    std::vector<selfmod::FeatureVector> outcomes;
    for (size_t p = 0; p < tree.players.size(); ++p) {
      outcomes.push_back(random_features(rng));
    }
    return tree.add_terminal(std::move(outcomes));
  }

  int gen_chance(int depth) {
    static const std::vector<std::vector<double>> prob_sets{
        {0.5, 0.5},         {0.25, 0.75},       {0.375, 0.625},
        {0.25, 0.25, 0.5},  {0.125, 0.375, 0.5}};
    const auto& probs = prob_sets[rng.next_below(prob_sets.size())];
    std::vector<int> children;
    for (size_t i = 0; i < probs.size(); ++i) children.push_back(gen(depth + 1));
    return tree.add_chance(probs, std::move(children));
  }

  int gen_decision(int depth) {
    --decision_budget;
    int owner = static_cast<int>(rng.next_below(tree.players.size()));
    size_t n_actions = 2 + rng.next_below(2);
    std::vector<std::string> actions;
    std::vector<int> children;
    for (size_t a = 0; a < n_actions; ++a) {
      actions.push_back("a" + std::to_string(a));
      children.push_back(gen(depth + 1));
    }
    return tree.add_decision(tree.players[owner], std::move(actions),
                             std::move(children));
  }

  int gen(int depth) {
    bool can_branch = depth < max_depth;
    bool can_decide = can_branch && decision_budget > 0;
    uint64_t roll = rng.next_below(10);
    if (can_decide && roll < 5) return gen_decision(depth);
    if (can_branch && roll < 7) return gen_chance(depth);
    return gen_terminal();
  }

  selfmod::GameTree build() {
    tree.root = gen(0);
    tree.validate();
    return tree;
  }
};

inline std::map<std::string, selfmod::UtilityFunction> random_utilities(
    const selfmod::GameTree& tree, selfmod::Rng& rng) {
  std::map<std::string, selfmod::UtilityFunction> out;
  for (const auto& p : tree.players) out.emplace(p, random_utility(rng));
  return out;
}

inline bool lotteries_equal(const selfmod::Lottery& a, const selfmod::Lottery& b) {
  if (a.branches.size() != b.branches.size()) return false;
  for (size_t i = 0; i < a.branches.size(); ++i) {
    if (a.branches[i].first != b.branches[i].first) return false;
    if (!(a.branches[i].second == b.branches[i].second)) return false;
  }
  return true;
}

inline bool results_equal(const selfmod::SpeResult& a, const selfmod::SpeResult& b) {
  if (!(a.profile == b.profile)) return false;
  if (a.outcomes.size() != b.outcomes.size()) return false;
  for (const auto& [player, lottery] : a.outcomes) {
    auto it = b.outcomes.find(player);
    if (it == b.outcomes.end() || !lotteries_equal(lottery, it->second)) {
      return false;
    }
  }
  return true;
}

}  // namespace testgen
