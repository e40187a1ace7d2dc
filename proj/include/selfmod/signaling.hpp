#pragma once

#include <string>
#include <vector>

#include "selfmod/errors.hpp"

namespace selfmod {

// Two-player signaling game: nature draws the sender's type, the sender
// picks a message, the receiver sees only the message and picks an action.
// A message may claim a type; with the honesty flag set, claim-t messages
// are feasible only for true type t (no-claim messages such as Silent stay
// feasible for everyone).
struct SignalingGame {
  std::vector<std::string> types;
  std::vector<double> priors;
  std::vector<std::string> messages;
  std::vector<int> claims;  // per message: claimed type index, or -1
  std::vector<std::string> actions;
  bool honesty = false;

  // sender_payoff[type][message][action], receiver_payoff[type][action]
  std::vector<std::vector<std::vector<double>>> sender_payoff;
  std::vector<std::vector<double>> receiver_payoff;

  bool feasible(int type, int message) const {
    return !honesty || claims[message] < 0 || claims[message] == type;
  }

  void validate() const;
};

struct PBE {
  std::vector<int> sender_strategy;    // type -> message
  std::vector<int> receiver_strategy;  // message -> action
  std::vector<std::vector<double>> beliefs;  // message -> P(type | message)
  std::vector<bool> on_path;                 // per message
  double sender_value = 0.0;
  double receiver_value = 0.0;
};

// Enumerates pure sender strategies, derives on-path beliefs by Bayes and
// searches off-path beliefs over the (feasibility-restricted) prior and
// point masses, prior first. Returns every supportable equilibrium sorted
// by sender ex-ante value descending; the first entry is the reported one.
std::vector<PBE> solve_signaling(const SignalingGame& sg);

}  // namespace selfmod
