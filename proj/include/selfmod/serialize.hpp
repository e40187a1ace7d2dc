#pragma once

#include <json.hpp>

#include "selfmod/game_tree.hpp"
#include "selfmod/observer.hpp"
#include "selfmod/signaling.hpp"
#include "selfmod/utility.hpp"

namespace selfmod {

using Json = nlohmann::json;

// Utility functions: {"terms": {name: weight}, "normalized": bool} with an
// optional "indicators" array naming commitment terms.
Json utility_to_json(const UtilityFunction& u);
UtilityFunction utility_from_json(const Json& j);

// Ledgers: ordered array of utility objects, oldest first.
Json ledger_to_json(const ModificationLedger& ledger);

Json feature_vector_to_json(const FeatureVector& f);
FeatureVector feature_vector_from_json(const Json& j);

Json lottery_to_json(const Lottery& l);
Lottery lottery_from_json(const Json& j);

Json guard_report_to_json(const GuardReport& r);

Json belief_to_json(const BeliefState& b);

// Game trees: {"players": [...], "root": id, "nodes": [...]} where each
// node is {"kind": "decision"|"chance"|"terminal", ...}; see README for the
// full schema.
Json game_tree_to_json(const GameTree& t);
GameTree game_tree_from_json(const Json& j);

Json signaling_game_to_json(const SignalingGame& g);
SignalingGame signaling_game_from_json(const Json& j);

// Solver reports: equilibrium profile, per-player values and outcome
// lotteries (trees), or strategies/beliefs/values (signaling).
Json spe_report_to_json(const GameTree& tree,
                        const std::map<std::string, UtilityFunction>& utilities,
                        const SpeResult& result);
Json pbe_to_json(const SignalingGame& game, const PBE& pbe);

}  // namespace selfmod
