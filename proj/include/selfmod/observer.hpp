#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selfmod/game_tree.hpp"
#include "selfmod/utility.hpp"

namespace selfmod {

// What another agent learns when asking an agent to show its utility
// function, depending on the agent's disclosure mode.
struct Observation {
  DisclosureMode mode = DisclosureMode::none;
  std::optional<UtilityFunction> utility;  // full
  std::vector<std::string> term_names;     // verified-terms, sorted
};

Observation disclose(const Agent& agent, DisclosureMode mode);

// Candidate utility functions with a probability for each. Probabilities
// stay strictly positive: an epsilon floor keeps every hypothesis alive.
struct BeliefState {
  std::vector<UtilityFunction> hypotheses;
  std::vector<double> probabilities;

  void validate() const;
};

// Likelihood of an observed action that the hypothesis did not predict;
// exact-rationality likelihoods would zero out posteriors outright.
inline constexpr double kRationalityNoise = 1e-3;
inline constexpr double kBeliefFloor = 1e-9;

// Bayes update from observed actions of one player. For each hypothesis
// the observed agent's utility is replaced by the hypothesis, the game is
// solved, and each observed action contributes (1 - eps) when it matches
// the prediction and eps/(m-1) otherwise (m = actions at that node).
// `observed` maps node ids owned by `role` to action labels.
BeliefState update_belief(const BeliefState& belief, const GameTree& game,
                          const std::map<std::string, UtilityFunction>& utilities,
                          const std::string& role,
                          const std::map<int, std::string>& observed,
                          double eps = kRationalityNoise);

// Expected value of a commitment whose partners discount it by the risk
// that the agent reverts: (1 - reversion_prob) * gain - precaution_cost.
double trust_value(double commitment_gain, double reversion_prob,
                   double precaution_cost);

}  // namespace selfmod
