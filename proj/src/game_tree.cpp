#include "selfmod/game_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace selfmod {

int GameTree::add_decision(const std::string& player,
                           std::vector<std::string> actions,
                           std::vector<int> children) {
  Node n;
  n.kind = Node::Kind::decision;
  n.player = player_index(player);
  if (n.player < 0) {
    throw Error(Errc::invalid_game, "unknown player '" + player + "'");
  }
  n.actions = std::move(actions);
  n.children = std::move(children);
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

int GameTree::add_chance(std::vector<double> probs, std::vector<int> children) {
  Node n;
  n.kind = Node::Kind::chance;
  n.probs = std::move(probs);
  n.children = std::move(children);
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

int GameTree::add_terminal(std::vector<FeatureVector> outcomes) {
  Node n;
  n.kind = Node::Kind::terminal;
  n.outcomes = std::move(outcomes);
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

int GameTree::player_index(const std::string& name) const {
  for (size_t i = 0; i < players.size(); ++i) {
    if (players[i] == name) return static_cast<int>(i);
  }
  return -1;
}

size_t GameTree::decision_node_count() const {
  size_t n = 0;
  for (const auto& node : nodes) {
    if (node.kind == Node::Kind::decision) ++n;
  }
  return n;
}

void GameTree::validate() const {
  if (players.empty()) throw Error(Errc::invalid_game, "no players");
  if (nodes.empty()) throw Error(Errc::invalid_game, "no nodes");
  if (root < 0 || root >= static_cast<int>(nodes.size())) {
    throw Error(Errc::invalid_game, "root out of range");
  }

  std::vector<int> indegree(nodes.size(), 0);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    switch (n.kind) {
      case Node::Kind::decision:
        if (n.player < 0 || n.player >= static_cast<int>(players.size())) {
          throw Error(Errc::invalid_game, "decision node with bad player index");
        }
        if (n.actions.empty()) {
          throw Error(Errc::invalid_game, "decision node with no actions");
        }
        if (n.actions.size() != n.children.size()) {
          throw Error(Errc::invalid_game,
                      "decision node actions/children size mismatch");
        }
        break;
      case Node::Kind::chance: {
        if (n.children.empty()) {
          throw Error(Errc::invalid_game, "chance node with no children");
        }
        if (n.probs.size() != n.children.size()) {
          throw Error(Errc::invalid_game,
                      "chance node probs/children size mismatch");
        }
        double sum = 0.0;
        for (double p : n.probs) {
          if (p < 0.0) throw Error(Errc::invalid_game, "negative chance probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
          throw Error(Errc::invalid_game, "chance probabilities sum to " +
                                              std::to_string(sum));
        }
        break;
      }
      case Node::Kind::terminal:
        if (n.outcomes.size() != players.size()) {
          throw Error(Errc::invalid_game,
                      "terminal must carry an outcome for every player");
        }
        break;
    }
    for (int c : n.children) {
      if (c < 0 || c >= static_cast<int>(nodes.size())) {
        throw Error(Errc::invalid_game, "dangling child reference");
      }
      indegree[c]++;
    }
  }

  for (size_t i = 0; i < nodes.size(); ++i) {
    int expected = (static_cast<int>(i) == root) ? 0 : 1;
    if (indegree[i] != expected) {
      throw Error(Errc::invalid_game,
                  "node " + std::to_string(i) +
                      " is not part of a tree rooted at the root (indegree " +
                      std::to_string(indegree[i]) + ")");
    }
  }

  // Indegree 1 everywhere but the root rules out cycles that include the
  // root; a cycle elsewhere would leave some node unreachable, so walk.
  std::vector<bool> seen(nodes.size(), false);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    if (seen[id]) throw Error(Errc::invalid_game, "cycle detected");
    seen[id] = true;
    for (int c : nodes[id].children) stack.push_back(c);
  }
  for (bool s : seen) {
    if (!s) throw Error(Errc::invalid_game, "node unreachable from root");
  }
}

void validate_profile(const GameTree& tree, const StrategyProfile& profile) {
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& n = tree.nodes[i];
    if (n.kind != GameTree::Node::Kind::decision) continue;
    auto it = profile.choices.find(static_cast<int>(i));
    if (it == profile.choices.end()) {
      throw Error(Errc::invalid_argument,
                  "profile misses decision node " + std::to_string(i));
    }
    if (std::find(n.actions.begin(), n.actions.end(), it->second) ==
        n.actions.end()) {
      throw Error(Errc::invalid_argument,
                  "profile action '" + it->second + "' not available at node " +
                      std::to_string(i));
    }
  }
}

namespace {

std::vector<const UtilityFunction*> aligned_utilities(
    const GameTree& tree,
    const std::map<std::string, UtilityFunction>& utilities) {
  std::vector<const UtilityFunction*> out;
  out.reserve(tree.players.size());
  for (const auto& p : tree.players) {
    auto it = utilities.find(p);
    if (it == utilities.end()) {
      throw Error(Errc::invalid_argument,
                  "no utility function for player '" + p + "'");
    }
    out.push_back(&it->second);
  }
  return out;
}

// Per-player values of every node under a fixed profile, child values
// combined in child order so both solvers do identical arithmetic. Terminal
// values are precomputed once per solve; `values` is a flat nodes x players
// array reused across profiles.
void profile_values(const GameTree& tree, const std::vector<double>& terminal_values,
                    const std::vector<int>& chosen, std::vector<double>& values,
                    size_t players, int id) {
  const auto& n = tree.nodes[id];
  double* v = &values[id * players];
  switch (n.kind) {
    case GameTree::Node::Kind::terminal:
      for (size_t p = 0; p < players; ++p) v[p] = terminal_values[id * players + p];
      break;
    case GameTree::Node::Kind::chance:
      for (size_t p = 0; p < players; ++p) v[p] = 0.0;
      for (size_t c = 0; c < n.children.size(); ++c) {
        profile_values(tree, terminal_values, chosen, values, players, n.children[c]);
        const double* child = &values[n.children[c] * players];
        for (size_t p = 0; p < players; ++p) v[p] += n.probs[c] * child[p];
      }
      break;
    case GameTree::Node::Kind::decision: {
      for (int c : n.children) {
        profile_values(tree, terminal_values, chosen, values, players, c);
      }
      const double* child = &values[n.children[chosen[id]] * players];
      for (size_t p = 0; p < players; ++p) v[p] = child[p];
      break;
    }
  }
}

}  // namespace

std::map<std::string, Lottery> induced_lotteries(const GameTree& tree,
                                                 const StrategyProfile& profile) {
  validate_profile(tree, profile);
  std::map<std::string, Lottery> out;
  std::vector<Lottery> per_player(tree.players.size());

  std::function<void(int, double)> walk = [&](int id, double prob) {
    const auto& n = tree.nodes[id];
    switch (n.kind) {
      case GameTree::Node::Kind::terminal:
        for (size_t p = 0; p < tree.players.size(); ++p) {
          per_player[p].branches.emplace_back(prob, n.outcomes[p]);
        }
        break;
      case GameTree::Node::Kind::chance:
        for (size_t c = 0; c < n.children.size(); ++c) {
          walk(n.children[c], prob * n.probs[c]);
        }
        break;
      case GameTree::Node::Kind::decision: {
        const std::string& label = profile.choices.at(id);
        size_t a = std::find(n.actions.begin(), n.actions.end(), label) -
                   n.actions.begin();
        walk(n.children[a], prob);
        break;
      }
    }
  };
  walk(tree.root, 1.0);

  for (size_t p = 0; p < tree.players.size(); ++p) {
    out[tree.players[p]] = std::move(per_player[p]);
  }
  return out;
}

SpeResult solve_spe(const GameTree& tree,
                    const std::map<std::string, UtilityFunction>& utilities) {
  tree.validate();
  auto us = aligned_utilities(tree, utilities);

  StrategyProfile profile;

  // Values bottom-up; at each decision node keep the first maximizer.
  std::function<std::vector<double>(int)> solve = [&](int id) {
    const auto& n = tree.nodes[id];
    std::vector<double> v(tree.players.size(), 0.0);
    switch (n.kind) {
      case GameTree::Node::Kind::terminal:
        for (size_t p = 0; p < tree.players.size(); ++p) {
          v[p] = evaluate(*us[p], n.outcomes[p]);
        }
        return v;
      case GameTree::Node::Kind::chance: {
        for (size_t c = 0; c < n.children.size(); ++c) {
          auto child = solve(n.children[c]);
          for (size_t p = 0; p < tree.players.size(); ++p) {
            v[p] += n.probs[c] * child[p];
          }
        }
        return v;
      }
      case GameTree::Node::Kind::decision: {
        size_t best = 0;
        std::vector<std::vector<double>> child_values(n.children.size());
        for (size_t c = 0; c < n.children.size(); ++c) {
          child_values[c] = solve(n.children[c]);
          if (c > 0 &&
              child_values[c][n.player] > child_values[best][n.player]) {
            best = c;
          }
        }
        profile.choices[id] = n.actions[best];
        return child_values[best];
      }
    }
    return v;
  };
  solve(tree.root);

  return SpeResult{profile, induced_lotteries(tree, profile)};
}

SpeResult brute_force_spe(
    const GameTree& tree,
    const std::map<std::string, UtilityFunction>& utilities) {
  tree.validate();
  auto us = aligned_utilities(tree, utilities);

  std::vector<int> decision_ids;
  for (size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.nodes[i].kind == GameTree::Node::Kind::decision) {
      decision_ids.push_back(static_cast<int>(i));
    }
  }
  if (decision_ids.size() > 20) {
    throw Error(Errc::too_large, "brute force bounded to 20 decision nodes");
  }
  double total = 1.0;
  for (int id : decision_ids) total *= tree.nodes[id].actions.size();
  if (total > double(1 << 22)) {
    throw Error(Errc::too_large, "brute force profile space too large");
  }

  std::vector<int> chosen(tree.nodes.size(), -1);
  for (int id : decision_ids) chosen[id] = 0;

  const size_t players = tree.players.size();
  std::vector<double> terminal_values(tree.nodes.size() * players, 0.0);
  for (size_t id = 0; id < tree.nodes.size(); ++id) {
    if (tree.nodes[id].kind != GameTree::Node::Kind::terminal) continue;
    for (size_t p = 0; p < players; ++p) {
      terminal_values[id * players + p] = evaluate(*us[p], tree.nodes[id].outcomes[p]);
    }
  }
  std::vector<double> values(tree.nodes.size() * players, 0.0);

  auto is_canonical_spe = [&]() {
    profile_values(tree, terminal_values, chosen, values, players, tree.root);
    for (int id : decision_ids) {
      const auto& n = tree.nodes[id];
      double v_chosen = values[n.children[chosen[id]] * players + n.player];
      for (size_t a = 0; a < n.children.size(); ++a) {
        double v_a = values[n.children[a] * players + n.player];
        if (v_a > v_chosen) return false;  // profitable one-shot deviation
        if (static_cast<int>(a) < chosen[id] && v_a == v_chosen) {
          return false;  // tie must go to the lowest action index
        }
      }
    }
    return true;
  };

  while (true) {
    if (is_canonical_spe()) {
      StrategyProfile profile;
      for (int id : decision_ids) {
        profile.choices[id] = tree.nodes[id].actions[chosen[id]];
      }
      return SpeResult{profile, induced_lotteries(tree, profile)};
    }
    // odometer
    size_t k = 0;
    for (; k < decision_ids.size(); ++k) {
      int id = decision_ids[k];
      if (++chosen[id] < static_cast<int>(tree.nodes[id].actions.size())) break;
      chosen[id] = 0;
    }
    if (k == decision_ids.size()) break;
  }
  // Unreachable for valid inputs: backward induction always yields one
  // canonical profile.
  throw Error(Errc::invalid_game, "no subgame-perfect equilibrium found");
}

}  // namespace selfmod
