#include "selfmod/signaling.hpp"

#include <algorithm>
#include <cmath>

namespace selfmod {

void SignalingGame::validate() const {
  size_t nt = types.size(), nm = messages.size(), na = actions.size();
  if (nt == 0 || nm == 0 || na == 0) {
    throw Error(Errc::invalid_argument, "signaling game needs types, messages and actions");
  }
  if (nt > 4 || nm > 6 || na > 6) {
    throw Error(Errc::too_large,
                "signaling solver bounded to 4 types, 6 messages, 6 actions");
  }
  if (priors.size() != nt) {
    throw Error(Errc::invalid_argument, "priors/types size mismatch");
  }
  double sum = 0.0;
  for (double p : priors) {
    if (p < 0.0) throw Error(Errc::invalid_argument, "negative prior");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(Errc::invalid_argument, "priors sum to " + std::to_string(sum));
  }
  if (claims.size() != nm) {
    throw Error(Errc::invalid_argument, "claims/messages size mismatch");
  }
  for (int c : claims) {
    if (c < -1 || c >= static_cast<int>(nt)) {
      throw Error(Errc::invalid_argument, "claim references unknown type");
    }
  }
  if (sender_payoff.size() != nt || receiver_payoff.size() != nt) {
    throw Error(Errc::invalid_argument, "payoff tables must cover every type");
  }
  for (size_t t = 0; t < nt; ++t) {
    if (sender_payoff[t].size() != nm) {
      throw Error(Errc::invalid_argument, "sender payoff table not total over messages");
    }
    for (size_t m = 0; m < nm; ++m) {
      if (sender_payoff[t][m].size() != na) {
        throw Error(Errc::invalid_argument, "sender payoff table not total over actions");
      }
    }
    if (receiver_payoff[t].size() != na) {
      throw Error(Errc::invalid_argument, "receiver payoff table not total over actions");
    }
  }
  for (size_t t = 0; t < nt; ++t) {
    bool any = false;
    for (size_t m = 0; m < nm; ++m) {
      if (feasible(static_cast<int>(t), static_cast<int>(m))) any = true;
    }
    if (!any) {
      throw Error(Errc::infeasible_game,
                  "type '" + types[t] + "' has no feasible message");
    }
  }
}

namespace {

// Receiver best response to a belief over types; ties to the lowest index.
int best_action(const SignalingGame& sg, const std::vector<double>& belief) {
  int best = 0;
  double best_v = 0.0;
  for (size_t a = 0; a < sg.actions.size(); ++a) {
    double v = 0.0;
    for (size_t t = 0; t < sg.types.size(); ++t) {
      v += belief[t] * sg.receiver_payoff[t][a];
    }
    if (a == 0 || v > best_v) {
      best = static_cast<int>(a);
      best_v = v;
    }
  }
  return best;
}

// Candidate off-path beliefs at message m: the prior restricted to types
// that can send m, then each feasible point mass, in type order.
std::vector<std::vector<double>> off_path_candidates(const SignalingGame& sg,
                                                     int m) {
  std::vector<std::vector<double>> out;
  size_t nt = sg.types.size();

  std::vector<int> feas;
  for (size_t t = 0; t < nt; ++t) {
    if (sg.feasible(static_cast<int>(t), m)) feas.push_back(static_cast<int>(t));
  }
  if (feas.empty()) return out;

  double mass = 0.0;
  for (int t : feas) mass += sg.priors[t];
  if (mass > 0.0) {
    std::vector<double> prior(nt, 0.0);
    for (int t : feas) prior[t] = sg.priors[t] / mass;
    out.push_back(std::move(prior));
  }
  for (int t : feas) {
    std::vector<double> pm(nt, 0.0);
    pm[t] = 1.0;
    if (mass > 0.0 && feas.size() == 1) break;  // point mass equals the restricted prior
    out.push_back(std::move(pm));
  }
  return out;
}

}  // namespace

std::vector<PBE> solve_signaling(const SignalingGame& sg) {
  sg.validate();
  size_t nt = sg.types.size(), nm = sg.messages.size();

  std::vector<std::vector<int>> feasible_messages(nt);
  for (size_t t = 0; t < nt; ++t) {
    for (size_t m = 0; m < nm; ++m) {
      if (sg.feasible(static_cast<int>(t), static_cast<int>(m))) {
        feasible_messages[t].push_back(static_cast<int>(m));
      }
    }
  }

  std::vector<PBE> found;

  std::vector<size_t> pick(nt, 0);  // index into feasible_messages[t]
  while (true) {
    std::vector<int> sigma(nt);
    for (size_t t = 0; t < nt; ++t) sigma[t] = feasible_messages[t][pick[t]];

    // On-path beliefs by Bayes.
    std::vector<double> mass(nm, 0.0);
    for (size_t t = 0; t < nt; ++t) mass[sigma[t]] += sg.priors[t];

    std::vector<std::vector<double>> beliefs(nm);
    std::vector<bool> on_path(nm, false);
    std::vector<int> action(nm, -1);
    for (size_t m = 0; m < nm; ++m) {
      if (mass[m] > 0.0) {
        on_path[m] = true;
        beliefs[m].assign(nt, 0.0);
        for (size_t t = 0; t < nt; ++t) {
          if (sigma[t] == static_cast<int>(m)) {
            beliefs[m][t] = sg.priors[t] / mass[m];
          }
        }
        action[m] = best_action(sg, beliefs[m]);
      }
    }

    // A positive-prior type's own message is on-path, so its equilibrium
    // payoff is already well defined; zero-prior types get theirs once
    // off-path actions are assigned.
    std::vector<double> eq_pay(nt, 0.0);
    for (size_t t = 0; t < nt; ++t) {
      if (sg.priors[t] > 0.0) {
        eq_pay[t] = sg.sender_payoff[t][sigma[t]][action[sigma[t]]];
      }
    }

    // Support each off-path message independently: first candidate belief
    // whose best response deters every feasible positive-prior deviation.
    bool supportable = true;
    for (size_t m = 0; m < nm && supportable; ++m) {
      if (on_path[m]) continue;
      bool supported = false;
      for (const auto& belief : off_path_candidates(sg, static_cast<int>(m))) {
        int a = best_action(sg, belief);
        bool deters = true;
        for (size_t t = 0; t < nt; ++t) {
          if (sg.priors[t] <= 0.0) continue;
          if (!sg.feasible(static_cast<int>(t), static_cast<int>(m))) continue;
          if (sg.sender_payoff[t][m][a] > eq_pay[t]) {
            deters = false;
            break;
          }
        }
        if (deters) {
          beliefs[m] = belief;
          action[m] = a;
          supported = true;
          break;
        }
      }
      supportable = supported;
    }
    for (size_t t = 0; t < nt && supportable; ++t) {
      if (sg.priors[t] <= 0.0) {
        eq_pay[t] = sg.sender_payoff[t][sigma[t]][action[sigma[t]]];
      }
    }

    if (supportable) {
      // Sender optimality against on-path responses too.
      bool sender_ok = true;
      for (size_t t = 0; t < nt && sender_ok; ++t) {
        for (int m : feasible_messages[t]) {
          if (sg.sender_payoff[t][m][action[m]] > eq_pay[t]) {
            sender_ok = false;
            break;
          }
        }
      }
      if (sender_ok) {
        PBE pbe;
        pbe.sender_strategy = sigma;
        pbe.receiver_strategy = action;
        pbe.beliefs = beliefs;
        pbe.on_path = on_path;
        for (size_t t = 0; t < nt; ++t) {
          pbe.sender_value += sg.priors[t] * eq_pay[t];
          pbe.receiver_value +=
              sg.priors[t] * sg.receiver_payoff[t][action[sigma[t]]];
        }
        found.push_back(std::move(pbe));
      }
    }

    size_t k = 0;
    for (; k < nt; ++k) {
      if (++pick[k] < feasible_messages[k].size()) break;
      pick[k] = 0;
    }
    if (k == nt) break;
  }

  std::stable_sort(found.begin(), found.end(), [](const PBE& a, const PBE& b) {
    if (a.sender_value != b.sender_value) return a.sender_value > b.sender_value;
    if (a.sender_strategy != b.sender_strategy) {
      return a.sender_strategy < b.sender_strategy;
    }
    return a.receiver_strategy < b.receiver_strategy;
  });
  return found;
}

}  // namespace selfmod
