#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "selfmod/observer.hpp"
#include "selfmod/rng.hpp"
#include "selfmod/scenarios.hpp"

using namespace selfmod;

namespace {

Agent make_agent(UtilityFunction u, DisclosureMode mode = DisclosureMode::full) {
  return Agent{"agi", ModificationLedger(renormalize(std::move(u)), GuardMode::none),
               mode};
}

}  // namespace

TEST_CASE("disclose: the three modes") {
  Agent agent = make_agent(UtilityFunction{{"paperclips", 0.5}, {"broke_promise", -0.5}});

  Observation full = disclose(agent, DisclosureMode::full);
  REQUIRE(full.utility.has_value());
  CHECK(*full.utility == agent.ledger.current());

  Observation terms = disclose(agent, DisclosureMode::verified_terms);
  CHECK_FALSE(terms.utility.has_value());
  CHECK(terms.term_names == std::vector<std::string>{"broke_promise", "paperclips"});

  Observation nothing = disclose(agent, DisclosureMode::none);
  CHECK_FALSE(nothing.utility.has_value());
  CHECK(nothing.term_names.empty());
}

TEST_CASE("disclose(full) round-trips through a point-mass belief") {
  Agent agent = make_agent(UtilityFunction{{"paperclips", 1.0}});
  Observation obs = disclose(agent, DisclosureMode::full);
  BeliefState point{{*obs.utility}, {1.0}};
  point.validate();
  CHECK(point.hypotheses[0] == agent.ledger.current());
}

TEST_CASE("update_belief: observing the commitment action is near-decisive") {
  scenarios::PromiseConfig cfg;
  GameTree tree = scenarios::build_promise_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  UtilityFunction production_only{{"production", 1.0}};
  UtilityFunction committed = add_commitment(production_only, "broke_promise", 4.0);

  BeliefState prior{{production_only, committed}, {0.5, 0.5}};
  std::map<std::string, UtilityFunction> others{{"alice", alice},
                                                {"agi", production_only}};

  // The AGI is seen playing Reward at its decision node (node 3).
  BeliefState post = update_belief(prior, tree, others, "agi", {{3, "Reward"}});
  double eps = kRationalityNoise;
  CHECK(post.probabilities[1] ==
        doctest::Approx((1 - eps) / ((1 - eps) + eps)).epsilon(1e-9));
  CHECK(post.probabilities[0] + post.probabilities[1] ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("update_belief: same predictions leave the prior unchanged") {
  scenarios::PromiseConfig cfg;
  GameTree tree = scenarios::build_promise_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  // Scaled weights predict identical behavior.
  BeliefState prior{{UtilityFunction{{"production", 1.0}},
                     UtilityFunction{{"production", 2.0}}},
                    {0.5, 0.5}};
  std::map<std::string, UtilityFunction> others{{"alice", alice},
                                                {"agi", UtilityFunction{{"production", 1.0}}}};
  BeliefState post = update_belief(prior, tree, others, "agi", {{3, "NoReward"}});
  CHECK(post.probabilities[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post.probabilities[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("update_belief: action predicted by neither keeps the prior") {
  scenarios::PromiseConfig cfg;
  GameTree tree = scenarios::build_promise_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  BeliefState prior{{UtilityFunction{{"production", 1.0}},
                     UtilityFunction{{"production", 2.0}}},
                    {0.25, 0.75}};
  std::map<std::string, UtilityFunction> others{{"alice", alice},
                                                {"agi", UtilityFunction{{"production", 1.0}}}};
  // Both hypotheses predict NoReward; Reward is off-prediction for both.
  BeliefState post = update_belief(prior, tree, others, "agi", {{3, "Reward"}});
  CHECK(post.probabilities[0] == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(post.probabilities[1] == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("update_belief: monotone likelihood and the epsilon floor") {
  scenarios::PromiseConfig cfg;
  GameTree tree = scenarios::build_promise_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  UtilityFunction production_only{{"production", 1.0}};
  UtilityFunction committed = add_commitment(production_only, "broke_promise", 4.0);
  std::map<std::string, UtilityFunction> others{{"alice", alice},
                                                {"agi", production_only}};

  BeliefState belief{{production_only, committed}, {0.5, 0.5}};
  for (int i = 0; i < 8; ++i) {
    BeliefState next = update_belief(belief, tree, others, "agi", {{3, "Reward"}});
    CHECK(next.probabilities[1] >= belief.probabilities[1] - 1e-15);
    belief = next;
  }
  // The production-only hypothesis survives at the floor.
  CHECK(belief.probabilities[0] >= kBeliefFloor / 2);
  double sum = belief.probabilities[0] + belief.probabilities[1];
  CHECK(std::abs(sum - 1.0) <= 1e-9);
}

TEST_CASE("update_belief: input validation") {
  scenarios::PromiseConfig cfg;
  GameTree tree = scenarios::build_promise_tree(cfg);
  UtilityFunction alice{{"payout", 1.0}};
  std::map<std::string, UtilityFunction> others{{"alice", alice},
                                                {"agi", UtilityFunction{{"production", 1.0}}}};

  BeliefState empty;
  CHECK_THROWS_AS(update_belief(empty, tree, others, "agi", {{3, "Reward"}}), Error);

  BeliefState ok{{UtilityFunction{{"production", 1.0}}}, {1.0}};
  // Node 4 is Alice's, not the AGI's.
  CHECK_THROWS_AS(update_belief(ok, tree, others, "agi", {{4, "Nice"}}), Error);
}

TEST_CASE("trust_value: examples and bounds") {
  CHECK(trust_value(10.0, 0.0, 0.0) == 10.0);
  CHECK(trust_value(10.0, 0.3, 1.0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(trust_value(10.0, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(trust_value(10.0, -0.1, 0.0), Error);
  CHECK_THROWS_AS(trust_value(10.0, 1.1, 0.0), Error);
  CHECK_THROWS_AS(trust_value(10.0, 0.5, -1.0), Error);
}

TEST_CASE("trust_value: monotone in all three arguments") {
  Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    double gain = rng.uniform(0.0, 20.0);
    double q = rng.next_double();
    double cost = rng.uniform(0.0, 5.0);
    double base = trust_value(gain, q, cost);
    CHECK(trust_value(gain + 1.0, q, cost) >= base);
    CHECK(trust_value(gain, std::min(1.0, q + 0.1), cost) <= base + 1e-12);
    CHECK(trust_value(gain, q, cost + 1.0) <= base);
  }
}
