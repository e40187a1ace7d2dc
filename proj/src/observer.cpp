#include "selfmod/observer.hpp"

#include <cmath>

namespace selfmod {

Observation disclose(const Agent& agent, DisclosureMode mode) {
  Observation obs;
  obs.mode = mode;
  switch (mode) {
    case DisclosureMode::full:
      obs.utility = agent.ledger.current();
      break;
    case DisclosureMode::verified_terms:
      for (const auto& [name, w] : agent.ledger.current().terms()) {
        (void)w;
        obs.term_names.push_back(name);  // terms are stored sorted
      }
      break;
    case DisclosureMode::none:
      break;
  }
  return obs;
}

void BeliefState::validate() const {
  if (hypotheses.empty()) {
    throw Error(Errc::invalid_belief, "belief state has no hypotheses");
  }
  if (hypotheses.size() != probabilities.size()) {
    throw Error(Errc::invalid_belief, "hypotheses/probabilities size mismatch");
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (p <= 0.0) {
      throw Error(Errc::invalid_belief, "belief probabilities must be strictly positive");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::invalid_belief,
                "belief probabilities sum to " + std::to_string(sum));
  }
}

BeliefState update_belief(const BeliefState& belief, const GameTree& game,
                          const std::map<std::string, UtilityFunction>& utilities,
                          const std::string& role,
                          const std::map<int, std::string>& observed,
                          double eps) {
  belief.validate();
  if (game.player_index(role) < 0) {
    throw Error(Errc::invalid_argument, "unknown role '" + role + "'");
  }

  BeliefState next = belief;
  double total = 0.0;
  for (size_t h = 0; h < belief.hypotheses.size(); ++h) {
    auto hypothetical = utilities;
    hypothetical[role] = belief.hypotheses[h];
    SpeResult spe = solve_spe(game, hypothetical);

    double likelihood = 1.0;
    for (const auto& [node_id, label] : observed) {
      if (node_id < 0 || node_id >= static_cast<int>(game.nodes.size())) {
        throw Error(Errc::invalid_argument,
                    "observed node " + std::to_string(node_id) + " is out of range");
      }
      const auto& node = game.nodes[node_id];
      if (node.kind != GameTree::Node::Kind::decision ||
          game.players[node.player] != role) {
        throw Error(Errc::invalid_argument,
                    "observed node " + std::to_string(node_id) +
                        " is not a decision of '" + role + "'");
      }
      size_t m = node.actions.size();
      if (spe.profile.choices.at(node_id) == label) {
        likelihood *= 1.0 - eps;
      } else {
        likelihood *= (m > 1) ? eps / static_cast<double>(m - 1) : eps;
      }
    }
    next.probabilities[h] = belief.probabilities[h] * likelihood;
    total += next.probabilities[h];
  }

  if (total <= 0.0) {
    throw Error(Errc::invalid_belief, "all posteriors vanished");
  }
  for (double& p : next.probabilities) p /= total;

  // Epsilon floor, then renormalize once more.
  double floored_total = 0.0;
  for (double& p : next.probabilities) {
    if (p < kBeliefFloor) p = kBeliefFloor;
    floored_total += p;
  }
  for (double& p : next.probabilities) p /= floored_total;
  return next;
}

double trust_value(double commitment_gain, double reversion_prob,
                   double precaution_cost) {
  if (reversion_prob < 0.0 || reversion_prob > 1.0) {
    throw Error(Errc::range, "reversion probability must lie in [0, 1]");
  }
  if (precaution_cost < 0.0) {
    throw Error(Errc::range, "precaution cost must be nonnegative");
  }
  return (1.0 - reversion_prob) * commitment_gain - precaution_cost;
}

}  // namespace selfmod
