#pragma once

#include <map>
#include <string>
#include <vector>

#include "selfmod/utility.hpp"

namespace selfmod {

// Extensive-form game tree. Terminals carry a FeatureVector per player
// role rather than payoff numbers: payoffs are induced by evaluating each
// player's current utility function, so a self-modification changes the
// solution without touching the tree.
struct GameTree {
  struct Node {
    enum class Kind { decision, chance, terminal };
    Kind kind = Kind::terminal;

    // decision
    int player = -1;  // index into players
    std::vector<std::string> actions;

    // decision and chance
    std::vector<int> children;

    // chance
    std::vector<double> probs;

    // terminal: one outcome per player, aligned with players
    std::vector<FeatureVector> outcomes;
  };

  std::vector<std::string> players;
  std::vector<Node> nodes;
  int root = 0;

  int add_decision(const std::string& player,
                   std::vector<std::string> actions, std::vector<int> children);
  int add_chance(std::vector<double> probs, std::vector<int> children);
  int add_terminal(std::vector<FeatureVector> outcomes);

  int player_index(const std::string& name) const;
  size_t decision_node_count() const;

  // Throws invalid-game on cycles, dangling children, bad probabilities or
  // incomplete terminal outcomes.
  void validate() const;
};

// Pure strategy: a chosen action label for every decision node.
struct StrategyProfile {
  std::map<int, std::string> choices;

  bool operator==(const StrategyProfile& other) const {
    return choices == other.choices;
  }
};

void validate_profile(const GameTree& tree, const StrategyProfile& profile);

struct SpeResult {
  StrategyProfile profile;
  std::map<std::string, Lottery> outcomes;  // per player, from the root
};

// Backward induction. At each decision node the owner picks the action
// maximizing their induced expected utility; ties go to the lowest action
// index. Every player must appear in `utilities`.
SpeResult solve_spe(const GameTree& tree,
                    const std::map<std::string, UtilityFunction>& utilities);

// Independent oracle: enumerates all pure profiles and keeps the one that
// passes a one-deviation check at every node with the same tie-break rule
// as solve_spe. Bounded to 20 decision nodes / 2^22 profiles.
SpeResult brute_force_spe(
    const GameTree& tree,
    const std::map<std::string, UtilityFunction>& utilities);

// Outcome distribution per player when `profile` is played from the root.
std::map<std::string, Lottery> induced_lotteries(const GameTree& tree,
                                                 const StrategyProfile& profile);

}  // namespace selfmod
