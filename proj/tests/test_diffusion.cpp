#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "aim/diffusion.hpp"
#include "aim/generators.hpp"
#include "aim/graph.hpp"

using namespace aim;
using Catch::Matchers::WithinAbs;

namespace {
const char* kChain3 = "3\n0 1 0.5\n1 2 0.5\n";
}

TEST_CASE("exact spread on a three-node chain") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  CHECK_THAT(exact_spread(g, SeedSet{}), WithinAbs(0.0, 1e-12));
  CHECK_THAT(exact_spread(g, SeedSet{0}), WithinAbs(1.75, 1e-12));
  CHECK_THAT(exact_spread(g, SeedSet{1}), WithinAbs(1.5, 1e-12));
  CHECK_THAT(exact_spread(g, SeedSet{2}), WithinAbs(1.0, 1e-12));
  CHECK_THAT(exact_spread(g, SeedSet{0, 1}), WithinAbs(2.5, 1e-12));
  CHECK_THAT(exact_spread(g, SeedSet{0, 2}), WithinAbs(2.5, 1e-12));
  CHECK_THAT(exact_spread(g, SeedSet{0, 1, 2}), WithinAbs(3.0, 1e-12));
}

TEST_CASE("two-level spread doubles seed out-edge chances") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  // Seeding 0 boosts 0->1 to 0.75 while 1->2 keeps a single 0.5 chance.
  CHECK_THAT(exact_two_level_spread(g, SeedSet{0}), WithinAbs(2.125, 1e-12));
  CHECK_THAT(exact_two_level_spread(g, SeedSet{1}), WithinAbs(1.75, 1e-12));
  CHECK_THAT(exact_two_level_spread(g, SeedSet{0, 1}), WithinAbs(2.75, 1e-12));
  CHECK_THAT(exact_two_level_spread(g, SeedSet{}), WithinAbs(0.0, 1e-12));
}

TEST_CASE("per-edge and joint two-level spreads agree") {
  Rng rng(1234);
  WeightLaw law;  // uniform weights
  for (int trial = 0; trial < 25; ++trial) {
    InfluenceGraph g = make_erdos_renyi(4, 0.6, law, rng);
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
      SeedSet seeds = SeedSet::from_mask(mask);
      double product = exact_two_level_spread(g, seeds);
      double joint = exact_two_level_spread_joint(g, seeds);
      REQUIRE_THAT(product, WithinAbs(joint, 1e-12));
    }
  }
}

TEST_CASE("two-level marginal is the residual gain of the boosted node") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  // Adding 1 to {0}: both terms boost 1->2 to 0.75, so the gain is
  // reach({0,1}) - reach({0}) = 2.75 - 1.875.
  CHECK_THAT(two_level_marginal(g, SeedSet{0}, 1), WithinAbs(0.875, 1e-12));
  CHECK_THAT(two_level_marginal(g, SeedSet{}, 0), WithinAbs(2.125, 1e-12));
  CHECK(two_level_marginal(g, SeedSet{0, 1}, 1) == 0.0);  // v already seeded
}

TEST_CASE("two-level marginal vanishes when the base already reaches v") {
  // 0 -> 1 with probability 1: node 1 is always active under S = {0}, so
  // granting it doubled out-edges cannot add anything.
  InfluenceGraph g = InfluenceGraph::parse_text("2\n0 1 1\n");
  CHECK_THAT(two_level_marginal(g, SeedSet{0}, 1), WithinAbs(0.0, 1e-12));
  CHECK_THAT(two_level_marginal_joint(g, SeedSet{0}, 1), WithinAbs(0.0, 1e-12));
  CHECK_THAT(marginal_gain(g, SeedSet{0}, 1), WithinAbs(0.0, 1e-12));

  // Regression: v pumps probability back into the base component; the
  // residual form keeps the marginal at zero and under twice the plain gain.
  InfluenceGraph h =
      InfluenceGraph::parse_text("3\n0 2 1\n1 0 0.7\n1 2 0.7\n2 0 0.3\n2 1 0.3\n");
  double plain = marginal_gain(h, SeedSet{0}, 2);
  double doubled = two_level_marginal(h, SeedSet{0}, 2);
  CHECK_THAT(plain, WithinAbs(0.0, 1e-12));
  CHECK_THAT(doubled, WithinAbs(0.0, 1e-12));
  CHECK(doubled <= 2.0 * plain + 1e-12);
}

TEST_CASE("two-level marginal joint enumeration matches the product form") {
  Rng rng(99);
  WeightLaw law;
  for (int trial = 0; trial < 25; ++trial) {
    InfluenceGraph g = make_erdos_renyi(4, 0.6, law, rng);
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
      SeedSet seeds = SeedSet::from_mask(mask);
      for (NodeId v = 0; v < 4; ++v) {
        double product = two_level_marginal(g, seeds, v);
        double joint = two_level_marginal_joint(g, seeds, v);
        REQUIRE_THAT(product, WithinAbs(joint, 1e-12));
      }
    }
  }
}

TEST_CASE("plain marginal gains on the chain") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  CHECK_THAT(marginal_gain(g, SeedSet{}, 0), WithinAbs(1.75, 1e-12));
  CHECK_THAT(marginal_gain(g, SeedSet{0}, 1), WithinAbs(0.75, 1e-12));
  CHECK_THAT(marginal_gain(g, SeedSet{0}, 2), WithinAbs(0.75, 1e-12));
  CHECK(marginal_gain(g, SeedSet{0}, 0) == 0.0);
}

TEST_CASE("monte carlo marginal tracks the exact value") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  double mc = marginal_gain_mc(g, SeedSet{0}, 1, 20000, 7);
  CHECK_THAT(mc, WithinAbs(0.75, 0.05));
  CHECK(marginal_gain_mc(g, SeedSet{0}, 0, 10, 7) == 0.0);
  CHECK_THROWS_AS(marginal_gain_mc(g, SeedSet{0}, 1, 0, 7), Error);
}

TEST_CASE("spread estimator is deterministic, calibrated, and guarded") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  SpreadEstimate a = estimate_spread(g, SeedSet{0}, 20000, 11);
  SpreadEstimate b = estimate_spread(g, SeedSet{0}, 20000, 11);
  CHECK(a.mean == b.mean);
  CHECK(a.half_width == b.half_width);
  CHECK(a.samples == 20000);
  CHECK_THAT(a.mean, WithinAbs(1.75, 5.0 * a.half_width + 1e-9));
  CHECK(a.half_width > 0.0);

  SpreadEstimate one = estimate_spread(g, SeedSet{0}, 1, 11);
  CHECK(one.samples == 1);
  CHECK(one.half_width == 0.0);
  CHECK_THROWS_AS(estimate_spread(g, SeedSet{0}, 0, 11), Error);

  // Degenerate graph: zero variance, exact mean.
  InfluenceGraph sure = InfluenceGraph::parse_text("2\n0 1 1\n");
  SpreadEstimate exact = estimate_spread(sure, SeedSet{0}, 50, 3);
  CHECK(exact.mean == 2.0);
  CHECK(exact.half_width == 0.0);
}

TEST_CASE("two-level graph unions shadow edges for seeds only") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  LiveEdgeGraph base(g);
  LiveEdgeGraph shadow(g);
  base.set_present(1, true);    // 1->2 fires in the base draw
  shadow.set_present(0, true);  // 0->1 fires only in the shadow draw
  LivePair pair{base, shadow};

  LiveEdgeGraph seeded0 = two_level_graph(pair, SeedSet{0});
  CHECK(seeded0.present(0));  // seed 0 takes its shadow chance
  CHECK(seeded0.present(1));  // non-seed edge keeps its base outcome
  CHECK(realized_spread(seeded0, SeedSet{0}) == 3);

  LiveEdgeGraph seeded1 = two_level_graph(pair, SeedSet{1});
  CHECK_FALSE(seeded1.present(0));  // 0 is not a seed: shadow ignored
  CHECK(seeded1.present(1));
  CHECK(realized_spread(seeded1, SeedSet{1}) == 2);
}

TEST_CASE("sampled live pairs respect pinned probabilities") {
  InfluenceGraph g = InfluenceGraph::parse_text("3\n0 1 1\n1 2 0\n");
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    LivePair pair = sample_live_pair(g, rng);
    CHECK(pair.base.present(0));
    CHECK(pair.shadow.present(0));
    CHECK_FALSE(pair.base.present(1));
    CHECK_FALSE(pair.shadow.present(1));
  }
}

TEST_CASE("conditional spread pins observed first-level edges") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);

  PartialRealisation failed;
  failed.add(0, {0});  // seeded 0, edge 0->1 observed dead
  CHECK_THAT(conditional_spread(g, failed, SeedSet{}), WithinAbs(1.0, 1e-12));
  CHECK_THAT(conditional_spread(g, failed, SeedSet{1}), WithinAbs(2.5, 1e-12));

  PartialRealisation fired;
  fired.add(0, {0, 1});  // edge 0->1 observed live
  CHECK_THAT(conditional_spread(g, fired, SeedSet{}), WithinAbs(2.5, 1e-12));

  PartialRealisation empty;
  CHECK_THAT(conditional_spread(g, empty, SeedSet{0}), WithinAbs(1.75, 1e-12));
}

TEST_CASE("strong conditional two-level spread boosts only fresh seeds") {
  InfluenceGraph g = InfluenceGraph::parse_text(kChain3);
  PartialRealisation failed;
  failed.add(0, {0});
  // Seed 1 is fresh, so 1->2 runs at 0.75; seed 0 already spent its chance.
  CHECK_THAT(strong_two_level_conditional_spread(g, failed, SeedSet{1}),
             WithinAbs(2.75, 1e-12));
  CHECK_THAT(strong_two_level_conditional_spread(g, failed, SeedSet{0}),
             WithinAbs(1.0, 1e-12));
  PartialRealisation empty;
  CHECK_THAT(strong_two_level_conditional_spread(g, empty, SeedSet{0}),
             WithinAbs(2.125, 1e-12));
}

TEST_CASE("two-level spread never exceeds twice the plain spread") {
  Rng rng(2024);
  WeightLaw law;
  for (int trial = 0; trial < 25; ++trial) {
    InfluenceGraph g = make_erdos_renyi(4, 0.5, law, rng);
    for (std::uint32_t mask = 0; mask < 16; ++mask) {
      SeedSet seeds = SeedSet::from_mask(mask);
      REQUIRE(exact_two_level_spread(g, seeds) <= 2.0 * exact_spread(g, seeds) + 1e-9);
    }
  }
}

TEST_CASE("enumeration refuses graphs with too many free edges") {
  // 6 nodes, 30 free edges: over the default 20-bit cap.
  std::vector<Edge> edges;
  for (NodeId u = 0; u < 6; ++u) {
    for (NodeId v = 0; v < 6; ++v) {
      if (u != v) edges.push_back(Edge{u, v, 0.5});
    }
  }
  InfluenceGraph g(6, edges);
  CHECK_THROWS_AS(exact_spread(g, SeedSet{0}), EnumerationTooLarge);
  try {
    exact_spread(g, SeedSet{0});
  } catch (const EnumerationTooLarge& e) {
    CHECK(e.required() == 30);
    CHECK(e.limit() == 20);
  }
  // A complete 5-node graph sits exactly at the 20-bit default and runs.
  std::vector<Edge> smaller;
  for (NodeId u = 0; u < 5; ++u) {
    for (NodeId v = 0; v < 5; ++v) {
      if (u != v) smaller.push_back(Edge{u, v, 0.5});
    }
  }
  CHECK(exact_spread(InfluenceGraph(5, smaller), SeedSet{0}) > 1.0);
}
