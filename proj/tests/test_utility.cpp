#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "selfmod/rng.hpp"
#include "selfmod/utility.hpp"

using namespace selfmod;

TEST_CASE("evaluate: weighted sums with missing features read as 0") {
  CHECK(evaluate(UtilityFunction{{"paperclips", 1.0}},
                 FeatureVector{{"paperclips", 7.0}}) == 7.0);
  CHECK(evaluate(UtilityFunction{{"paperclips", 0.5}, {"thumbtacks", 0.5}},
                 FeatureVector{{"paperclips", 4.0}, {"thumbtacks", 10.0}}) == 7.0);
  CHECK(evaluate(UtilityFunction{{"thumbtacks", 0.5}, {"paperclips", -0.5}},
                 FeatureVector{{"paperclips", 6.0}, {"thumbtacks", 6.0}}) == 0.0);
  CHECK(evaluate(UtilityFunction{{"absent", 2.0}, {"present", 1.0}},
                 FeatureVector{{"present", 3.0}}) == 3.0);
}

TEST_CASE("expected_utility: probability-weighted averages") {
  UtilityFunction u{{"x", 1.0}};
  CHECK(expected_utility(u, Lottery{{1.0, FeatureVector{{"x", 5.0}}}}) == 5.0);
  CHECK(expected_utility(u, Lottery{{0.5, FeatureVector{{"x", 0.0}}},
                                    {0.5, FeatureVector{{"x", -10.0}}}}) == -5.0);
  // Tiny probability, astronomical magnitude.
  double v = expected_utility(u, Lottery{{1e-12, FeatureVector{{"x", -1e15}}},
                                         {1.0 - 1e-12, FeatureVector{{"x", 0.0}}}});
  CHECK(v == doctest::Approx(-1000.0).epsilon(1e-9));
}

TEST_CASE("expected_utility: rejects invalid lotteries") {
  UtilityFunction u{{"x", 1.0}};
  Lottery bad{{0.5, FeatureVector{{"x", 1.0}}}, {0.4, FeatureVector{{"x", 2.0}}}};
  CHECK_THROWS_WITH_AS(expected_utility(u, bad),
                       doctest::Contains("sum to"), Error);
  Lottery negative{{-0.5, FeatureVector{{"x", 1.0}}}, {1.5, FeatureVector{{"x", 2.0}}}};
  CHECK_THROWS_AS(expected_utility(u, negative), Error);
}

TEST_CASE("renormalize: L1 normalization with sign preservation") {
  UtilityFunction a = renormalize(UtilityFunction{{"a", 2.0}, {"b", 2.0}});
  CHECK(a.weight("a") == 0.5);
  CHECK(a.weight("b") == 0.5);
  CHECK(a.normalized());

  UtilityFunction b = renormalize(UtilityFunction{{"a", 3.0}, {"b", -1.0}});
  CHECK(b.weight("a") == 0.75);
  CHECK(b.weight("b") == -0.25);

  CHECK_THROWS_AS(renormalize(UtilityFunction{{"a", 0.0}, {"b", 0.0}}), Error);
  try {
    renormalize(UtilityFunction{{"a", 0.0}});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_utility);
  }
}

TEST_CASE("renormalize: exactly idempotent on random functions") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    UtilityFunction u = testgen::random_normalized_utility(rng);
    UtilityFunction uu = renormalize(u);
    REQUIRE(u.terms().size() == uu.terms().size());
    for (size_t k = 0; k < u.terms().size(); ++k) {
      CHECK(std::abs(u.terms()[k].second - uu.terms()[k].second) <= 1e-12);
    }
  }
}

TEST_CASE("scale invariance: argmax unchanged under positive scaling") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    UtilityFunction u = testgen::random_utility(rng);
    double c = std::ldexp(1.0, static_cast<int>(rng.next_below(7)) - 3);  // 2^-3 .. 2^3
    std::vector<UtilityFunction::Term> scaled;
    for (const auto& [name, w] : u.terms()) scaled.emplace_back(name, c * w);
    UtilityFunction cu(scaled);

    std::vector<FeatureVector> outcomes;
    for (int k = 0; k < 6; ++k) outcomes.push_back(testgen::random_features(rng));

    auto argmax = [&](const UtilityFunction& f) {
      size_t best = 0;
      for (size_t k = 1; k < outcomes.size(); ++k) {
        if (evaluate(f, outcomes[k]) > evaluate(f, outcomes[best])) best = k;
      }
      return best;
    };
    CHECK(argmax(u) == argmax(cu));
  }
}

TEST_CASE("add_commitment: ranking flips exactly past the reneging gain") {
  UtilityFunction u{{"production", 1.0}};
  FeatureVector keep{{"production", 7.0}, {"broke_promise", 0.0}};
  FeatureVector renege{{"production", 10.0}, {"broke_promise", 1.0}};

  UtilityFunction committed = add_commitment(u, "broke_promise", 3.0);
  CHECK(committed.normalized());
  CHECK(committed.weight("production") == 0.25);
  CHECK(committed.weight("broke_promise") == -0.75);

  // The reneging gain is 3; below it reneging still wins, above it loses.
  UtilityFunction below = add_commitment(u, "broke_promise", 2.9);
  UtilityFunction above = add_commitment(u, "broke_promise", 3.1);
  CHECK(evaluate(below, renege) > evaluate(below, keep));
  CHECK(evaluate(above, renege) < evaluate(above, keep));
  CHECK(evaluate(committed, renege) == evaluate(committed, keep));
}

TEST_CASE("add_commitment: zero penalty never changes preferences") {
  Rng rng(11);
  UtilityFunction u{{"production", 1.0}, {"spares", -0.5}};
  UtilityFunction zeroed = add_commitment(u, "flag", 0.0);
  for (int i = 0; i < 100; ++i) {
    FeatureVector a = testgen::random_features(rng);
    FeatureVector b = testgen::random_features(rng);
    bool before = evaluate(u, a) > evaluate(u, b);
    bool after = evaluate(zeroed, a) > evaluate(zeroed, b);
    CHECK(before == after);
  }
}

TEST_CASE("add_commitment: huge penalty dominates bounded shortfalls") {
  UtilityFunction u{{"paperclips", 1.0}};
  UtilityFunction c = add_commitment(u, "paid_blackmail", 1e6);
  // Any paid outcome ranks below any unpaid outcome with deficit < 1e6.
  CHECK(evaluate(c, FeatureVector{{"paperclips", 1e5}, {"paid_blackmail", 1.0}}) <
        evaluate(c, FeatureVector{{"paperclips", 0.0}, {"paid_blackmail", 0.0}}));
  // A deficit beyond the penalty outweighs it.
  CHECK(evaluate(c, FeatureVector{{"paperclips", 2e6}, {"paid_blackmail", 1.0}}) >
        evaluate(c, FeatureVector{{"paperclips", 0.0}, {"paid_blackmail", 0.0}}));
}

TEST_CASE("add_commitment: collisions and stacking") {
  UtilityFunction u{{"production", 1.0}};
  CHECK_THROWS_AS(add_commitment(u, "production", 1.0), Error);
  try {
    add_commitment(u, "production", 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::name_collision);
  }
  CHECK_THROWS_AS(add_commitment(u, "flag", -1.0), Error);

  UtilityFunction once = add_commitment(u, "flag", 1.0);
  UtilityFunction twice = add_commitment(once, "flag", 1.0);
  CHECK(twice.weight("flag") < once.weight("flag"));  // deeper commitment
  CHECK(twice.commitment_terms().size() == 1);
}

TEST_CASE("guard_check: current-only accepts strict improvement") {
  ModificationLedger ledger(renormalize(UtilityFunction{{"paperclips", 1.0}}),
                            GuardMode::current_only);
  Lottery status_quo = Lottery::degenerate(FeatureVector{{"paperclips", 4.0}});
  Lottery adopted = Lottery::degenerate(FeatureVector{{"paperclips", 7.0}});
  GuardReport r = guard_check(ledger, UtilityFunction{{"paperclips", 0.5}, {"allies", 0.5}},
                              status_quo, adopted);
  CHECK(r.accepted);
  REQUIRE(r.comparisons.size() == 1);
  CHECK(r.comparisons[0].status_quo_value == 4.0);
  CHECK(r.comparisons[0].adopted_value == 7.0);
}

TEST_CASE("guard_check: full chain rejects harm to the first self") {
  ModificationLedger ledger(renormalize(UtilityFunction{{"paperclips", 1.0}}),
                            GuardMode::full_chain);
  UtilityFunction u2 =
      renormalize(UtilityFunction{{"paperclips", 0.5}, {"thumbtacks", 0.5}});
  // Adopting u2 improved paperclips, so it passed; replay that step first.
  Lottery solo = Lottery::degenerate(FeatureVector{{"paperclips", 4.0}});
  Lottery alliance =
      Lottery::degenerate(FeatureVector{{"paperclips", 6.0}, {"thumbtacks", 6.0}});
  Agent agent{"agi", ledger, DisclosureMode::none};
  ApplyResult step1 = apply_modification(agent, u2, solo, alliance);
  REQUIRE(step1.report.accepted);

  UtilityFunction u3 =
      renormalize(UtilityFunction{{"thumbtacks", 0.5}, {"paperclips", -0.5}});
  Lottery war = Lottery::degenerate(FeatureVector{{"paperclips", 2.0}, {"thumbtacks", 2.0}});
  Lottery capitulation =
      Lottery::degenerate(FeatureVector{{"paperclips", 0.0}, {"thumbtacks", 12.0}});
  GuardReport r = guard_check(step1.agent.ledger, u3, war, capitulation);
  CHECK_FALSE(r.accepted);
  REQUIRE(r.comparisons.size() == 2);
  CHECK_FALSE(r.comparisons[0].passed);  // fails under the original function
  CHECK(r.comparisons[1].passed);        // current self prefers capitulation
}

TEST_CASE("guard_check: identity modification is rejected") {
  ModificationLedger ledger(renormalize(UtilityFunction{{"x", 1.0}}),
                            GuardMode::current_only);
  Lottery l = Lottery::degenerate(FeatureVector{{"x", 3.0}});
  GuardReport r = guard_check(ledger, ledger.current(), l, l);
  CHECK_FALSE(r.accepted);
}

TEST_CASE("guard_check: empty ledger is an error, mode none accepts") {
  ModificationLedger empty;
  Lottery l = Lottery::degenerate(FeatureVector{{"x", 1.0}});
  CHECK_THROWS_AS(guard_check(empty, UtilityFunction{{"x", 1.0}}, l, l), Error);

  ModificationLedger unguarded(renormalize(UtilityFunction{{"x", 1.0}}),
                               GuardMode::none);
  GuardReport r = guard_check(unguarded, UtilityFunction{{"y", 1.0}}, l, l);
  CHECK(r.accepted);
  CHECK(r.comparisons.empty());
}

TEST_CASE("apply_modification: ledger bookkeeping") {
  Agent agent{"a", ModificationLedger(renormalize(UtilityFunction{{"x", 1.0}}),
                                      GuardMode::current_only),
              DisclosureMode::none};
  Lottery sq = Lottery::degenerate(FeatureVector{{"x", 1.0}});
  Lottery better = Lottery::degenerate(FeatureVector{{"x", 2.0}});

  UtilityFunction candidate = renormalize(UtilityFunction{{"x", 0.5}, {"y", 0.5}});
  ApplyResult accepted = apply_modification(agent, candidate, sq, better);
  CHECK(accepted.report.accepted);
  CHECK(accepted.agent.ledger.size() == 2);
  CHECK(accepted.agent.ledger.current() == candidate);
  CHECK(accepted.agent.ledger.audits().size() == 1);

  ApplyResult rejected = apply_modification(agent, candidate, sq, sq);
  CHECK_FALSE(rejected.report.accepted);
  CHECK(rejected.agent.ledger.size() == 1);
}

TEST_CASE("apply_modification: full-chain audits replay cleanly") {
  Agent agent{"a", ModificationLedger(renormalize(UtilityFunction{{"g", 1.0}}),
                                      GuardMode::full_chain),
              DisclosureMode::none};
  ApplyResult s1 = apply_modification(
      agent, renormalize(UtilityFunction{{"g", 0.5}, {"h", 0.5}}),
      Lottery::degenerate(FeatureVector{{"g", 1.0}}),
      Lottery::degenerate(FeatureVector{{"g", 2.0}}));
  REQUIRE(s1.report.accepted);
  ApplyResult s2 = apply_modification(
      s1.agent, renormalize(UtilityFunction{{"g", 0.25}, {"h", 0.75}}),
      Lottery::degenerate(FeatureVector{{"g", 2.0}}),
      Lottery::degenerate(FeatureVector{{"g", 3.0}, {"h", 1.0}}));
  REQUIRE(s2.report.accepted);

  // Replay: every audit must show no harm under every earlier function.
  const auto& ledger = s2.agent.ledger;
  for (size_t j = 0; j < ledger.audits().size(); ++j) {
    const AuditRecord& audit = ledger.audits()[j];
    for (size_t i = 0; i <= j; ++i) {
      const UtilityFunction& past = ledger.history()[i];
      CHECK(expected_utility(past, audit.adopted) >=
            expected_utility(past, audit.status_quo) - 1e-9);
    }
  }
}

TEST_CASE("guard soundness: randomized full-chain ledgers replay nonnegative") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Agent agent{"a", ModificationLedger(testgen::random_normalized_utility(rng),
                                        GuardMode::full_chain),
                DisclosureMode::none};
    for (int step = 0; step < 6; ++step) {
      UtilityFunction candidate = testgen::random_normalized_utility(rng);
      Lottery sq = Lottery::degenerate(testgen::random_features(rng));
      Lottery adopted = Lottery::degenerate(testgen::random_features(rng));
      agent = apply_modification(agent, candidate, sq, adopted).agent;
    }
    const auto& ledger = agent.ledger;
    for (size_t j = 0; j < ledger.audits().size(); ++j) {
      for (size_t i = 0; i <= j; ++i) {
        CHECK(expected_utility(ledger.history()[i], ledger.audits()[j].adopted) >=
              expected_utility(ledger.history()[i], ledger.audits()[j].status_quo) -
                  1e-9);
      }
    }
  }
}

TEST_CASE("weight_distance: examples and preconditions") {
  UtilityFunction a = renormalize(UtilityFunction{{"a", 1.0}});
  UtilityFunction b = renormalize(UtilityFunction{{"b", 1.0}});
  CHECK(weight_distance(a, a) == 0.0);
  CHECK(weight_distance(a, b) == 2.0);

  UtilityFunction c(std::vector<UtilityFunction::Term>{{"a", 0.5}, {"b", 0.5}}, true);
  UtilityFunction d(std::vector<UtilityFunction::Term>{{"a", 0.75}, {"b", -0.25}}, true);
  CHECK(weight_distance(c, d) == 1.0);

  CHECK_THROWS_AS(weight_distance(UtilityFunction{{"a", 1.0}}, a), Error);
}

TEST_CASE("weight_distance: metric properties on random functions") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    UtilityFunction x = testgen::random_normalized_utility(rng);
    UtilityFunction y = testgen::random_normalized_utility(rng);
    UtilityFunction z = testgen::random_normalized_utility(rng);
    double dxy = weight_distance(x, y);
    double dyx = weight_distance(y, x);
    double dxz = weight_distance(x, z);
    double dzy = weight_distance(z, y);
    CHECK(dxy == dyx);
    CHECK(dxy >= 0.0);
    CHECK(dxy <= dxz + dzy + 1e-12);
    CHECK(weight_distance(x, x) == 0.0);
    if (dxy == 0.0) CHECK(x.terms() == y.terms());
  }
}

TEST_CASE("feature vectors: indicators must be 0 or 1") {
  FeatureVector f{{"broke_promise", 1.0}, {"production", 10.0}};
  f.mark_indicator("broke_promise");
  CHECK(f.is_indicator("broke_promise"));
  CHECK_FALSE(f.is_indicator("production"));
  f.validate();

  FeatureVector bad{{"broke_promise", 0.5}};
  CHECK_THROWS_AS(bad.mark_indicator("broke_promise"), Error);
}

TEST_CASE("utility function invariants") {
  CHECK_THROWS_AS(UtilityFunction(std::vector<UtilityFunction::Term>{}), Error);
  CHECK_THROWS_AS(
      UtilityFunction(std::vector<UtilityFunction::Term>{{"a", 1.0}, {"a", 2.0}}),
      Error);
  // Normalized flag demands unit L1 mass.
  CHECK_THROWS_AS(
      UtilityFunction(std::vector<UtilityFunction::Term>{{"a", 0.7}, {"b", 0.7}}, true),
      Error);
}
