#include "selfmod/serialize.hpp"

#include <algorithm>

namespace selfmod {

// Grants deserialization access to commitment bookkeeping.
struct UtilitySerde {
  static UtilityFunction build(std::vector<UtilityFunction::Term> terms,
                               bool normalized,
                               std::vector<std::string> indicators) {
    UtilityFunction u(std::move(terms), normalized);
    std::sort(indicators.begin(), indicators.end());
    u.commitment_terms_ = std::move(indicators);
    return u;
  }
};

Json utility_to_json(const UtilityFunction& u) {
  Json terms = Json::object();
  for (const auto& [name, w] : u.terms()) terms[name] = w;
  Json j{{"terms", std::move(terms)}, {"normalized", u.normalized()}};
  if (!u.commitment_terms().empty()) j["indicators"] = u.commitment_terms();
  return j;
}

UtilityFunction utility_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_object()) {
    throw Error(Errc::parse, "utility function JSON needs a 'terms' object");
  }
  std::vector<UtilityFunction::Term> terms;
  for (const auto& [name, w] : j["terms"].items()) {
    if (!w.is_number()) {
      throw Error(Errc::parse, "utility weight for '" + name + "' must be a number");
    }
    terms.emplace_back(name, w.get<double>());
  }
  bool normalized = j.value("normalized", false);
  std::vector<std::string> indicators;
  if (j.contains("indicators")) {
    for (const auto& name : j["indicators"]) {
      indicators.push_back(name.get<std::string>());
    }
  }
  return UtilitySerde::build(std::move(terms), normalized, std::move(indicators));
}

Json ledger_to_json(const ModificationLedger& ledger) {
  Json arr = Json::array();
  for (const auto& u : ledger.history()) arr.push_back(utility_to_json(u));
  return arr;
}

Json feature_vector_to_json(const FeatureVector& f) {
  Json entries = Json::object();
  for (const auto& [name, v] : f.entries()) entries[name] = v;
  if (f.indicators().empty()) return entries;
  return Json{{"entries", std::move(entries)}, {"indicators", f.indicators()}};
}

FeatureVector feature_vector_from_json(const Json& j) {
  FeatureVector f;
  const Json* entries = &j;
  if (j.is_object() && j.contains("entries")) entries = &j["entries"];
  for (const auto& [name, v] : entries->items()) {
    if (!v.is_number()) {
      throw Error(Errc::parse, "feature '" + name + "' must be a number");
    }
    f.set(name, v.get<double>());
  }
  if (j.is_object() && j.contains("indicators")) {
    for (const auto& name : j["indicators"]) {
      f.mark_indicator(name.get<std::string>());
    }
  }
  return f;
}

Json lottery_to_json(const Lottery& l) {
  Json arr = Json::array();
  for (const auto& [p, f] : l.branches) {
    arr.push_back(Json{{"p", p}, {"outcome", feature_vector_to_json(f)}});
  }
  return arr;
}

Lottery lottery_from_json(const Json& j) {
  Lottery l;
  for (const auto& branch : j) {
    l.branches.emplace_back(branch.at("p").get<double>(),
                            feature_vector_from_json(branch.at("outcome")));
  }
  l.validate();
  return l;
}

Json guard_report_to_json(const GuardReport& r) {
  Json comparisons = Json::array();
  for (const auto& c : r.comparisons) {
    comparisons.push_back(Json{{"history_index", c.history_index},
                               {"status_quo_value", c.status_quo_value},
                               {"adopted_value", c.adopted_value},
                               {"passed", c.passed}});
  }
  return Json{{"accepted", r.accepted},
              {"mode", guard_mode_name(r.mode)},
              {"comparisons", std::move(comparisons)}};
}

Json belief_to_json(const BeliefState& b) {
  Json hyps = Json::array();
  for (const auto& u : b.hypotheses) hyps.push_back(utility_to_json(u));
  return Json{{"hypotheses", std::move(hyps)},
              {"probabilities", b.probabilities}};
}

Json game_tree_to_json(const GameTree& t) {
  Json nodes = Json::array();
  for (const auto& n : t.nodes) {
    Json jn;
    switch (n.kind) {
      case GameTree::Node::Kind::decision:
        jn["kind"] = "decision";
        jn["player"] = t.players[n.player];
        jn["actions"] = n.actions;
        jn["children"] = n.children;
        break;
      case GameTree::Node::Kind::chance:
        jn["kind"] = "chance";
        jn["probs"] = n.probs;
        jn["children"] = n.children;
        break;
      case GameTree::Node::Kind::terminal: {
        jn["kind"] = "terminal";
        Json outcomes = Json::object();
        for (size_t p = 0; p < t.players.size(); ++p) {
          outcomes[t.players[p]] = feature_vector_to_json(n.outcomes[p]);
        }
        jn["outcomes"] = std::move(outcomes);
        break;
      }
    }
    nodes.push_back(std::move(jn));
  }
  return Json{{"players", t.players}, {"root", t.root}, {"nodes", std::move(nodes)}};
}

GameTree game_tree_from_json(const Json& j) {
  GameTree t;
  for (const auto& p : j.at("players")) t.players.push_back(p.get<std::string>());
  t.root = j.value("root", 0);
  for (const auto& jn : j.at("nodes")) {
    const std::string kind = jn.at("kind").get<std::string>();
    GameTree::Node n;
    if (kind == "decision") {
      n.kind = GameTree::Node::Kind::decision;
      n.player = t.player_index(jn.at("player").get<std::string>());
      if (n.player < 0) {
        throw Error(Errc::invalid_game,
                    "decision node for unknown player '" +
                        jn.at("player").get<std::string>() + "'");
      }
      for (const auto& a : jn.at("actions")) n.actions.push_back(a.get<std::string>());
      for (const auto& c : jn.at("children")) n.children.push_back(c.get<int>());
    } else if (kind == "chance") {
      n.kind = GameTree::Node::Kind::chance;
      for (const auto& p : jn.at("probs")) n.probs.push_back(p.get<double>());
      for (const auto& c : jn.at("children")) n.children.push_back(c.get<int>());
    } else if (kind == "terminal") {
      n.kind = GameTree::Node::Kind::terminal;
      const auto& outcomes = jn.at("outcomes");
      for (const auto& player : t.players) {
        if (!outcomes.contains(player)) {
          throw Error(Errc::invalid_game,
                      "terminal missing outcome for player '" + player + "'");
        }
        n.outcomes.push_back(feature_vector_from_json(outcomes[player]));
      }
    } else {
      throw Error(Errc::parse, "unknown node kind '" + kind + "'");
    }
    t.nodes.push_back(std::move(n));
  }
  t.validate();
  return t;
}

Json signaling_game_to_json(const SignalingGame& g) {
  Json claims = Json::object();
  for (size_t m = 0; m < g.messages.size(); ++m) {
    if (g.claims[m] >= 0) claims[g.messages[m]] = g.types[g.claims[m]];
  }
  Json sender = Json::object();
  Json receiver = Json::object();
  for (size_t t = 0; t < g.types.size(); ++t) {
    Json by_message = Json::object();
    for (size_t m = 0; m < g.messages.size(); ++m) {
      Json by_action = Json::object();
      for (size_t a = 0; a < g.actions.size(); ++a) {
        by_action[g.actions[a]] = g.sender_payoff[t][m][a];
      }
      by_message[g.messages[m]] = std::move(by_action);
    }
    sender[g.types[t]] = std::move(by_message);
    Json recv_actions = Json::object();
    for (size_t a = 0; a < g.actions.size(); ++a) {
      recv_actions[g.actions[a]] = g.receiver_payoff[t][a];
    }
    receiver[g.types[t]] = std::move(recv_actions);
  }
  return Json{{"types", g.types},        {"priors", g.priors},
              {"messages", g.messages},  {"claims", std::move(claims)},
              {"actions", g.actions},    {"honesty", g.honesty},
              {"sender_payoff", std::move(sender)},
              {"receiver_payoff", std::move(receiver)}};
}

SignalingGame signaling_game_from_json(const Json& j) {
  SignalingGame g;
  for (const auto& t : j.at("types")) g.types.push_back(t.get<std::string>());
  for (const auto& p : j.at("priors")) g.priors.push_back(p.get<double>());
  for (const auto& m : j.at("messages")) g.messages.push_back(m.get<std::string>());
  for (const auto& a : j.at("actions")) g.actions.push_back(a.get<std::string>());
  g.honesty = j.value("honesty", false);

  g.claims.assign(g.messages.size(), -1);
  if (j.contains("claims")) {
    for (const auto& [message, type] : j.at("claims").items()) {
      auto mit = std::find(g.messages.begin(), g.messages.end(), message);
      auto tit = std::find(g.types.begin(), g.types.end(), type.get<std::string>());
      if (mit == g.messages.end() || tit == g.types.end()) {
        throw Error(Errc::parse, "claim references unknown message or type");
      }
      g.claims[mit - g.messages.begin()] = static_cast<int>(tit - g.types.begin());
    }
  }

  const auto& sender = j.at("sender_payoff");
  const auto& receiver = j.at("receiver_payoff");
  for (const auto& type : g.types) {
    std::vector<std::vector<double>> by_message;
    for (const auto& message : g.messages) {
      std::vector<double> by_action;
      for (const auto& action : g.actions) {
        by_action.push_back(sender.at(type).at(message).at(action).get<double>());
      }
      by_message.push_back(std::move(by_action));
    }
    g.sender_payoff.push_back(std::move(by_message));
    std::vector<double> recv;
    for (const auto& action : g.actions) {
      recv.push_back(receiver.at(type).at(action).get<double>());
    }
    g.receiver_payoff.push_back(std::move(recv));
  }
  g.validate();
  return g;
}

Json spe_report_to_json(const GameTree& tree,
                        const std::map<std::string, UtilityFunction>& utilities,
                        const SpeResult& result) {
  (void)tree;
  Json profile = Json::object();
  for (const auto& [node, action] : result.profile.choices) {
    profile[std::to_string(node)] = action;
  }
  Json values = Json::object();
  Json outcomes = Json::object();
  for (const auto& [player, lottery] : result.outcomes) {
    values[player] = expected_utility(utilities.at(player), lottery);
    outcomes[player] = lottery_to_json(lottery);
  }
  return Json{{"profile", std::move(profile)},
              {"values", std::move(values)},
              {"outcomes", std::move(outcomes)}};
}

Json pbe_to_json(const SignalingGame& game, const PBE& pbe) {
  Json sender = Json::object();
  for (size_t t = 0; t < game.types.size(); ++t) {
    sender[game.types[t]] = game.messages[pbe.sender_strategy[t]];
  }
  Json receiver = Json::object();
  Json beliefs = Json::object();
  Json on_path = Json::object();
  for (size_t m = 0; m < game.messages.size(); ++m) {
    receiver[game.messages[m]] = game.actions[pbe.receiver_strategy[m]];
    Json b = Json::object();
    for (size_t t = 0; t < game.types.size(); ++t) {
      b[game.types[t]] = pbe.beliefs[m][t];
    }
    beliefs[game.messages[m]] = std::move(b);
    on_path[game.messages[m]] = static_cast<bool>(pbe.on_path[m]);
  }
  return Json{{"sender_strategy", std::move(sender)},
              {"receiver_strategy", std::move(receiver)},
              {"beliefs", std::move(beliefs)},
              {"on_path", std::move(on_path)},
              {"sender_value", pbe.sender_value},
              {"receiver_value", pbe.receiver_value}};
}

}  // namespace selfmod
