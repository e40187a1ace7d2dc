#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "selfmod/config.hpp"
#include "selfmod/report.hpp"
#include "selfmod/scenarios.hpp"
#include "selfmod/serialize.hpp"
#include "selfmod/toml.hpp"

using namespace selfmod;

TEST_CASE("toml: tables, scalars, arrays, comments") {
  toml::Document doc = toml::parse(R"(
# top comment
title = "demo"
[scenario.mugging]
q = 1e-12
harm = 1e15   # inline comment
[ecosystem]
agents = 100
adaptation = "guarded"
flags = [true, false]
values = [1, 2.5, 3]
)");
  CHECK(doc.at("title").as_string() == "demo");
  CHECK(doc.at("scenario.mugging.q").as_double() == 1e-12);
  CHECK(doc.at("scenario.mugging.harm").as_double() == 1e15);
  CHECK(doc.at("ecosystem.agents").as_int() == 100);
  CHECK(doc.at("ecosystem.adaptation").as_string() == "guarded");
  CHECK(doc.at("ecosystem.flags").array[0].as_bool());
  CHECK(doc.at("ecosystem.values").array[1].as_double() == 2.5);
}

TEST_CASE("toml: errors carry line and column") {
  CHECK_THROWS_WITH_AS(toml::parse("x =\n"), doctest::Contains("line 1"), Error);
  CHECK_THROWS_WITH_AS(toml::parse("a = 1\nb = \"unterminated\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(toml::parse("a = 1\na = 2\n"),
                       doctest::Contains("duplicate"), Error);
  CHECK_THROWS_WITH_AS(toml::parse("a = 1 b = 2\n"),
                       doctest::Contains("trailing"), Error);
  try {
    toml::parse("ok = 1\nbad = @@\n");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("config: empty input yields full defaults") {
  LoadedConfig cfg = config_from_document(toml::Document{});
  CHECK(cfg.scenarios.promise.reward_cost == 3.0);
  CHECK(cfg.scenarios.mugging.threat_prob == 1e-12);
  CHECK(cfg.ecosystem.agents == 100);
  CHECK(cfg.ecosystem.adaptation == "guarded");
}

TEST_CASE("config: section overrides touch only their keys") {
  toml::Document doc = toml::parse("[scenario.mugging]\nq = 0.25\n");
  LoadedConfig cfg = config_from_document(doc);
  CHECK(cfg.scenarios.mugging.threat_prob == 0.25);
  CHECK(cfg.scenarios.mugging.harm == 1e15);     // untouched default
  CHECK(cfg.scenarios.mugging.demand == 1.0);    // untouched default
  CHECK(cfg.scenarios.promise.reward_cost == 3.0);
}

TEST_CASE("config: unknown keys are rejected") {
  toml::Document doc = toml::parse("[scenario.promise]\nrewardcost = 1\n");
  CHECK_THROWS_WITH_AS(config_from_document(doc),
                       doctest::Contains("unknown config key"), Error);
}

TEST_CASE("config: ordering violations fail at load, naming the ordering") {
  toml::Document doc =
      toml::parse("[scenario.promise]\nalice_mean = 5.0\n");  // Mean beats Nice+Reward
  CHECK_THROWS_WITH_AS(config_from_document(doc),
                       doctest::Contains("alice_prefers_nice_rewarded_over_mean"),
                       Error);
}

TEST_CASE("config: hostile actions and alliance outcomes from nested keys") {
  toml::Document doc = toml::parse(R"(
[scenario.hostile.action.sabotage]
plain = -40
[scenario.hostile.action.idle]
noop = 0
[scenario.hostile.declared]
plain = 1
green = -2
[scenario.alliance.solo]
paperclips = 5
)");
  LoadedConfig cfg = config_from_document(doc);
  REQUIRE(cfg.scenarios.hostile.actions.size() == 2);  // replaced defaults, sorted
  CHECK(cfg.scenarios.hostile.actions[0].first == "idle");
  CHECK(cfg.scenarios.hostile.actions[1].first == "sabotage");
  CHECK(cfg.scenarios.hostile.actions[1].second.get("plain") == -40.0);
  CHECK(cfg.scenarios.hostile.declared.weight("green") == -2.0);
  CHECK(expected_utility(UtilityFunction{{"paperclips", 1.0}},
                         cfg.scenarios.alliance.solo) == 5.0);
}

TEST_CASE("config: scalars where tables belong are config errors") {
  toml::Document doc = toml::parse("[scenario.hostile]\noriginal = 5\n");
  CHECK_THROWS_AS(config_from_document(doc), Error);
  toml::Document doc2 = toml::parse("[scenario.hostile]\naction = 1\n");
  CHECK_THROWS_AS(config_from_document(doc2), Error);
  toml::Document doc3 = toml::parse("[scenario.hostile.action]\nnodot = 1\n");
  CHECK_THROWS_WITH_AS(config_from_document(doc3),
                       doctest::Contains("action.<name>.<feature>"), Error);
}

TEST_CASE("config: sweep overrides and scalar parsing") {
  toml::Document doc;
  apply_override(doc, "ecosystem.maintenance", "3.5");
  apply_override(doc, "ecosystem.rounds", "100");
  LoadedConfig cfg = config_from_document(doc);
  CHECK(cfg.ecosystem.maintenance == 3.5);
  CHECK(cfg.ecosystem.rounds == 100);

  apply_override(doc, "ecosystem.not_a_field", "1");
  CHECK_THROWS_WITH_AS(config_from_document(doc),
                       doctest::Contains("unknown config key"), Error);
}

TEST_CASE("csv: RFC 4180 quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("with,comma") == "\"with,comma\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");

  CsvWriter w({"a", "b"});
  w.add_row({"1,5", "x"});
  CHECK(w.str() == "a,b\n\"1,5\",x\n");
  CHECK_THROWS_AS(w.add_row({"only-one"}), Error);
}

TEST_CASE("format_double: stable shortest round-trip") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-3.0) == format_double(-3.0));
  for (double v : {1e-12, 1.0 / 3.0, 123456.789, -0.1}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("serialization: utility functions round-trip, schema as documented") {
  UtilityFunction u = add_commitment(UtilityFunction{{"production", 1.0}},
                                     "broke_promise", 3.0);
  Json j = utility_to_json(u);
  CHECK(j["normalized"] == true);
  CHECK(j["terms"]["production"] == 0.25);
  CHECK(j["terms"]["broke_promise"] == -0.75);
  CHECK(j["indicators"][0] == "broke_promise");

  UtilityFunction back = utility_from_json(j);
  CHECK(back == u);
  CHECK(back.commitment_terms() == u.commitment_terms());

  // Plain schema without indicators.
  UtilityFunction simple = utility_from_json(
      Json::parse(R"({"terms": {"x": 0.5, "y": -0.5}, "normalized": true})"));
  CHECK(simple.weight("y") == -0.5);
  CHECK_THROWS_AS(utility_from_json(Json::parse("{}")), Error);
}

TEST_CASE("serialization: ledgers are ordered arrays of utilities") {
  Agent agent{"a", ModificationLedger(renormalize(UtilityFunction{{"x", 1.0}}),
                                      GuardMode::current_only),
              DisclosureMode::none};
  ApplyResult step = apply_modification(
      agent, renormalize(UtilityFunction{{"x", 0.5}, {"y", 0.5}}),
      Lottery::degenerate(FeatureVector{{"x", 1.0}}),
      Lottery::degenerate(FeatureVector{{"x", 2.0}}));
  Json j = ledger_to_json(step.agent.ledger);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["terms"]["x"] == 1.0);
  CHECK(j[1]["terms"]["y"] == 0.5);
}

TEST_CASE("serialization: game trees round-trip and re-solve identically") {
  scenarios::PromiseConfig cfg;
  GameTree tree = scenarios::build_promise_tree(cfg);
  Json j = game_tree_to_json(tree);
  GameTree back = game_tree_from_json(j);

  std::map<std::string, UtilityFunction> us{
      {"alice", UtilityFunction{{"payout", 1.0}}},
      {"agi", UtilityFunction{{"production", 1.0}}}};
  SpeResult a = solve_spe(tree, us);
  SpeResult b = solve_spe(back, us);
  CHECK(a.profile == b.profile);

  Json bad = j;
  bad["nodes"][0]["kind"] = "mystery";
  CHECK_THROWS_AS(game_tree_from_json(bad), Error);
}

TEST_CASE("serialization: signaling games round-trip") {
  scenarios::CastleConfig cfg;
  SignalingGame g = scenarios::build_castle_game(cfg, true);
  SignalingGame back = signaling_game_from_json(signaling_game_to_json(g));
  CHECK(back.types == g.types);
  CHECK(back.claims == g.claims);
  CHECK(back.honesty == g.honesty);
  CHECK(back.sender_payoff == g.sender_payoff);
  CHECK(back.receiver_payoff == g.receiver_payoff);

  auto a = solve_signaling(g);
  auto b = solve_signaling(back);
  REQUIRE(a.size() == b.size());
  CHECK(a.front().sender_value == b.front().sender_value);
}

TEST_CASE("serialization: lotteries and belief states") {
  Lottery l{{0.25, FeatureVector{{"x", 1.0}}}, {0.75, FeatureVector{{"x", -1.0}}}};
  Lottery back = lottery_from_json(lottery_to_json(l));
  REQUIRE(back.branches.size() == 2);
  CHECK(back.branches[0].first == 0.25);
  CHECK(back.branches[1].second.get("x") == -1.0);

  BeliefState belief{{renormalize(UtilityFunction{{"x", 1.0}}),
                      renormalize(UtilityFunction{{"y", 1.0}})},
                     {0.25, 0.75}};
  Json j = belief_to_json(belief);
  CHECK(j["probabilities"][1] == 0.75);
  CHECK(j["hypotheses"][0]["terms"]["x"] == 1.0);
}
