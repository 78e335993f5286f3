#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "aim/diffusion.hpp"
#include "aim/generators.hpp"
#include "aim/graph.hpp"
#include "aim/policies.hpp"
#include "aim/verify.hpp"

using namespace aim;
using Catch::Matchers::WithinAbs;

namespace {
const char* kChain3 = "3\n0 1 0.5\n1 2 0.5\n";
}

TEST_CASE("non-adaptive greedy picks the best marginal each round") {
  // Node 0 is worth 1.9 alone; afterwards the isolated node 2 beats
  // topping up the already-likely node 1.
  InfluenceGraph g = InfluenceGraph::parse_text("3\n0 1 0.9\n");
  ExactSpreadEvaluator eval(g);
  GreedyTrace trace = nonadaptive_greedy(g, 2, eval);
  CHECK(trace.seeds == std::vector<NodeId>{0, 2});
  REQUIRE(trace.values.size() == 2);
  CHECK_THAT(trace.values[0], WithinAbs(1.9, 1e-12));
  CHECK_THAT(trace.values[1], WithinAbs(2.9, 1e-12));
}

TEST_CASE("greedy breaks ties toward the smallest node id") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  ExactSpreadEvaluator eval(g);
  GreedyTrace trace = nonadaptive_greedy(g, 2, eval);
  // Adding 1 or 2 to {0} gains 0.75 either way; 1 wins the tie.
  CHECK(trace.seeds == std::vector<NodeId>{0, 1});
  CHECK_THAT(trace.values[0], WithinAbs(1.75, 1e-12));
  CHECK_THAT(trace.values[1], WithinAbs(2.5, 1e-12));
}

TEST_CASE("greedy validates its budget") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  ExactSpreadEvaluator eval(g);
  CHECK_THROWS_AS(nonadaptive_greedy(g, 0, eval), Error);
  CHECK_THROWS_AS(nonadaptive_greedy(g, 4, eval), Error);
}

TEST_CASE("frozen batch evaluator is deterministic and close to exact") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  FrozenBatchEvaluator a(g, 20000, 17);
  FrozenBatchEvaluator b(g, 20000, 17);
  CHECK(a.value(SeedSet{0}) == b.value(SeedSet{0}));
  CHECK_THAT(a.value(SeedSet{0}), WithinAbs(1.75, 0.05));
  CHECK_THAT(a.value(SeedSet{0, 1}), WithinAbs(2.5, 0.05));
  CHECK_THROWS_AS(FrozenBatchEvaluator(g, 0, 17), Error);

  GreedyTrace trace = nonadaptive_greedy(g, 3, a);
  for (std::size_t i = 1; i < trace.values.size(); ++i) {
    CHECK(trace.values[i] >= trace.values[i - 1]);  // frozen draws keep greedy monotone
  }
}

TEST_CASE("run_policy records myopic observations only") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  LiveEdgeGraph live(g);
  live.set_present(0, true);
  live.set_present(1, true);
  PartialRealisation psi = run_policy(constant_policy({0}), live);
  REQUIRE(psi.size() == 1);
  const std::vector<NodeId>* obs = psi.observation(0);
  REQUIRE(obs != nullptr);
  // Seeding 0 reveals 0 itself and its direct hit on 1 -- never the
  // transitive activation of 2.
  CHECK(*obs == std::vector<NodeId>{0, 1});

  live.set_present(0, false);
  psi = run_policy(constant_policy({0}), live);
  CHECK(*psi.observation(0) == std::vector<NodeId>{0});
}

TEST_CASE("policy violations are rejected") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  LiveEdgeGraph live(g);
  CHECK_THROWS_AS(constant_policy({0, 0}), Error);

  AdaptivePolicy repeat;
  repeat.budget = 2;
  repeat.pick = [](const PartialRealisation&) { return NodeId{0}; };
  CHECK_THROWS_AS(run_policy(repeat, live), PolicyViolation);

  AdaptivePolicy bogus;
  bogus.budget = 1;
  bogus.pick = [](const PartialRealisation&) { return NodeId{9}; };
  CHECK_THROWS_AS(run_policy(bogus, live), PolicyViolation);

  AdaptivePolicy oversize;
  oversize.budget = 4;
  oversize.pick = [](const PartialRealisation& psi) { return static_cast<NodeId>(psi.size()); };
  CHECK_THROWS_AS(run_policy(oversize, live), PolicyViolation);
}

TEST_CASE("exact policy evaluation on constant policies") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  CHECK_THAT(evaluate_policy(g, constant_policy({0, 1}), ExactMode{}), WithinAbs(2.5, 1e-12));
  CHECK_THAT(evaluate_policy(g, constant_policy({0, 2}), ExactMode{}), WithinAbs(2.5, 1e-12));
  CHECK_THAT(evaluate_policy(g, constant_policy({2}), ExactMode{}), WithinAbs(1.0, 1e-12));
}

TEST_CASE("adaptive greedy reacts to feedback on the chain") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  AdaptivePolicy pi = adaptive_greedy(g, 2, ExactMode{});

  PartialRealisation empty;
  CHECK(pi.pick(empty) == 0);

  PartialRealisation dead;
  dead.add(0, {0});  // 0 -> 1 failed: restart the cascade at 1
  CHECK(pi.pick(dead) == 1);

  PartialRealisation fired;
  fired.add(0, {0, 1});  // 0 -> 1 fired: 1 is redundant, jump to 2
  CHECK(pi.pick(fired) == 2);

  CHECK_THAT(evaluate_policy(g, pi, ExactMode{}), WithinAbs(2.75, 1e-12));
  CHECK_THROWS_AS(adaptive_greedy(g, 0, ExactMode{}), Error);
  CHECK_THROWS_AS(adaptive_greedy(g, 4, ExactMode{}), Error);
}

TEST_CASE("observation-tree evaluation matches live-edge enumeration") {
  Rng rng(31);
  WeightLaw law;
  for (int trial = 0; trial < 15; ++trial) {
    InfluenceGraph g = make_erdos_renyi(4, 0.6, law, rng);
    AdaptivePolicy pi = adaptive_greedy(g, 2, ExactMode{});
    double direct = evaluate_policy(g, pi, ExactMode{});
    double via_obs = evaluate_policy_via_observations(g, pi);
    REQUIRE_THAT(direct, WithinAbs(via_obs, 1e-12));
  }
}

TEST_CASE("monte carlo policy evaluation tracks the exact value") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  AdaptivePolicy pi = adaptive_greedy(g, 2, ExactMode{});
  SpreadEstimate est = evaluate_policy(g, pi, McMode{20000, 23});
  CHECK_THAT(est.mean, WithinAbs(2.75, 5.0 * est.half_width + 1e-9));
  CHECK(est.samples == 20000);

  AdaptivePolicy mc_pi = adaptive_greedy(g, 2, McMode{4000, 29});
  CHECK(mc_pi.pick(PartialRealisation{}) == 0);  // clear winner survives sampling noise
  CHECK_THROWS_AS(adaptive_greedy(g, 2, McMode{0, 29}), Error);
}

TEST_CASE("selection probabilities of the adaptive greedy policy") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  AdaptivePolicy pi = adaptive_greedy(g, 2, ExactMode{});
  SelectionProbabilities x = selection_probabilities(g, pi);
  REQUIRE(x.x.size() == 3);
  CHECK_THAT(x.x[0], WithinAbs(1.0, 1e-12));   // always the first pick
  CHECK_THAT(x.x[1], WithinAbs(0.5, 1e-12));   // picked when 0 -> 1 fails
  CHECK_THAT(x.x[2], WithinAbs(0.5, 1e-12));   // picked when 0 -> 1 fires
  CHECK_THAT(x.sum(), WithinAbs(2.0, 1e-12));  // one unit per budget slot
}

TEST_CASE("randomized single-pick value") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  AdaptivePolicy pi = adaptive_greedy(g, 2, ExactMode{});
  SelectionProbabilities x = selection_probabilities(g, pi);
  // (1*1.75 + 0.5*1.5 + 0.5*1) / 2 against an empty base.
  CHECK_THAT(rand_t_value(g, SeedSet{}, x, 2), WithinAbs(1.5, 1e-12));
  CHECK_THROWS_AS(rand_t_value(g, SeedSet{}, x, 0), Error);
  SelectionProbabilities bad;
  bad.x = {1.0};
  CHECK_THROWS_AS(rand_t_value(g, SeedSet{}, bad, 2), Error);
}

TEST_CASE("hybrid value of a constant policy is a two-level spread") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  // The policy always picks {0,1}, so the hybrid with base {} seeds exactly
  // {0,1} with doubled out-edges.
  CHECK_THAT(hybrid_two_level_value(g, SeedSet{}, constant_policy({0, 1})),
             WithinAbs(exact_two_level_spread(g, SeedSet{0, 1}), 1e-12));
  CHECK_THAT(hybrid_two_level_value(g, SeedSet{2}, constant_policy({0, 1})),
             WithinAbs(3.0, 1e-12));
}

TEST_CASE("strong hybrid at the empty realisation equals the weak hybrid") {
  Rng rng(47);
  WeightLaw law;
  for (int trial = 0; trial < 10; ++trial) {
    InfluenceGraph g = make_erdos_renyi(4, 0.6, law, rng);
    AdaptivePolicy pi = adaptive_greedy(g, 2, ExactMode{});
    PartialRealisation empty;
    REQUIRE_THAT(strong_hybrid_value(g, empty, pi),
                 WithinAbs(hybrid_two_level_value(g, SeedSet{}, pi), 1e-12));
  }
}

TEST_CASE("conditional two-level marginal keeps both chances fresh at the root") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  CachedReach cache(g, EnumLimits{});
  PartialRealisation empty;
  // At the empty observation the marginal measures v's doubled edges against
  // the plain spread of the base: reach({0,1} with 1 boosted) - sigma({0}).
  CHECK_THAT(detail::delta2_given(g, cache, SeedSet{0}, 1, empty),
             WithinAbs(2.75 - 1.75, 1e-12));
  // The residual form shares the boost across both terms and is smaller.
  CHECK_THAT(two_level_marginal(g, SeedSet{0}, 1), WithinAbs(0.875, 1e-12));

  PartialRealisation fired;
  fired.add(0, {0, 1});  // shadow-level: 0 -> 1 seen live, pinned present
  CHECK_THAT(detail::delta2_given(g, cache, SeedSet{}, 1, fired),
             WithinAbs(2.75 - 2.5, 1e-12));
  PartialRealisation dead;
  dead.add(0, {0});  // shadow-level miss: first-level chance stays free
  CHECK_THAT(detail::delta2_given(g, cache, SeedSet{}, 1, dead),
             WithinAbs(2.75 - 1.75, 1e-12));
  // Nodes already in the base or already observed contribute nothing.
  CHECK(detail::delta2_given(g, cache, SeedSet{1}, 1, empty) == 0.0);
  CHECK(detail::delta2_given(g, cache, SeedSet{}, 0, fired) == 0.0);
}
