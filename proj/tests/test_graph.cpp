#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <vector>

#include "aim/graph.hpp"
#include "aim/rng.hpp"
#include "aim/seed_set.hpp"

using namespace aim;

TEST_CASE("parse reads node count then edge lines") {
  InfluenceGraph g = InfluenceGraph::parse_text("3\n0 1 0.5\n1 2 0.25\n");
  REQUIRE(g.node_count() == 3);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edge(0).source == 0);
  CHECK(g.edge(0).target == 1);
  CHECK(g.edge(0).prob == 0.5);
  CHECK(g.edge(1).source == 1);
  CHECK(g.edge(1).target == 2);
  CHECK(g.edge(1).prob == 0.25);
}

TEST_CASE("parse skips comments, blank lines, and CRLF endings") {
  std::string text =
      "# influence graph\r\n"
      "\r\n"
      "  4\r\n"
      "# edges below\n"
      "\t0 3 1\n"
      "   \n"
      "2 1 0\r\n";
  InfluenceGraph g = InfluenceGraph::parse_text(text);
  REQUIRE(g.node_count() == 4);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.has_edge(0, 3));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(3, 0));
}

TEST_CASE("parse accepts an empty graph and an edgeless graph") {
  InfluenceGraph empty = InfluenceGraph::parse_text("0\n");
  CHECK(empty.node_count() == 0);
  CHECK(empty.edge_count() == 0);
  InfluenceGraph lonely = InfluenceGraph::parse_text("5\n");
  CHECK(lonely.node_count() == 5);
  CHECK(lonely.edge_count() == 0);
}

TEST_CASE("parse errors carry the offending line number") {
  auto line_of = [](const std::string& text) {
    try {
      InfluenceGraph::parse_text(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("x\n") == 1);                       // bad node count
  CHECK(line_of("-2\n") == 1);                      // negative node count
  CHECK(line_of("3\n0 1\n") == 2);                  // too few fields
  CHECK(line_of("3\n0 1 0.5 9\n") == 2);            // too many fields
  CHECK(line_of("3\n0 one 0.5\n") == 2);            // bad target id
  CHECK(line_of("3\nzero 1 0.5\n") == 2);           // bad source id
  CHECK(line_of("3\n0 1 p\n") == 2);                // bad probability
  CHECK(line_of("3\n0 3 0.5\n") == 2);              // target out of range
  CHECK(line_of("3\n-1 1 0.5\n") == 2);             // source out of range
  CHECK(line_of("3\n1 1 0.5\n") == 2);              // self-loop
  CHECK(line_of("3\n0 1 1.5\n") == 2);              // probability above one
  CHECK(line_of("3\n0 1 -0.5\n") == 2);             // probability below zero
  CHECK(line_of("3\n0 1 nan\n") == 2);              // non-finite probability
  CHECK(line_of("# only a comment\n") == 1);        // missing node count
  CHECK(line_of("") == 1);                          // empty input
  CHECK(line_of("3\n0 1 0.5\n# dup next\n0 1 0.5\n") == 4);
}

TEST_CASE("parse error messages describe the problem") {
  try {
    InfluenceGraph::parse_text("2\n0 1 0.5\n0 1 0.7\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("duplicate edge") != std::string::npos);
  }
  try {
    InfluenceGraph::parse_text("2\n1 1 0.5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("self-loop") != std::string::npos);
  }
}

TEST_CASE("constructor validates edges like the parser") {
  CHECK_THROWS_AS(InfluenceGraph(-1, {}), Error);
  CHECK_THROWS_AS(InfluenceGraph(2, {Edge{0, 0, 0.5}}), Error);
  CHECK_THROWS_AS(InfluenceGraph(2, {Edge{0, 2, 0.5}}), Error);
  CHECK_THROWS_AS(InfluenceGraph(2, {Edge{0, 1, 2.0}}), Error);
  CHECK_THROWS_AS(InfluenceGraph(2, {Edge{0, 1, 0.5}, Edge{0, 1, 0.6}}), Error);
}

TEST_CASE("text round trip preserves structure and probabilities exactly") {
  std::string text = "4\n0 1 0.3\n0 2 0.123456789012345678\n3 0 1\n2 3 0\n";
  InfluenceGraph g = InfluenceGraph::parse_text(text);
  InfluenceGraph h = InfluenceGraph::parse_text(g.to_text());
  REQUIRE(h.node_count() == g.node_count());
  REQUIRE(h.edge_count() == g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    CHECK(h.edge(e).source == g.edge(e).source);
    CHECK(h.edge(e).target == g.edge(e).target);
    CHECK(h.edge(e).prob == g.edge(e).prob);  // bit-exact through setprecision(17)
  }
}

TEST_CASE("adjacency lists are ordered by target id") {
  // Edges deliberately inserted out of target order.
  InfluenceGraph g(4, {Edge{1, 3, 0.1}, Edge{1, 0, 0.2}, Edge{1, 2, 0.3}, Edge{0, 2, 0.4}});
  std::vector<NodeId> targets;
  for (int e : g.out_edges(1)) targets.push_back(g.edge(e).target);
  CHECK(targets == std::vector<NodeId>{0, 2, 3});
  CHECK(g.out_degree(1) == 3);
  CHECK(g.out_degree(0) == 1);
  CHECK(g.out_degree(2) == 0);
  CHECK(g.out_neighbors(1) == std::vector<NodeId>{0, 2, 3});
}

TEST_CASE("live-edge sampling respects degenerate probabilities") {
  InfluenceGraph g(3, {Edge{0, 1, 1.0}, Edge{1, 2, 0.0}});
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    LiveEdgeGraph live = sample_live_edge(g, rng);
    CHECK(live.present(0));
    CHECK_FALSE(live.present(1));
  }
}

TEST_CASE("realized reach is BFS over live edges only") {
  InfluenceGraph g(4, {Edge{0, 1, 0.5}, Edge{1, 2, 0.5}, Edge{2, 3, 0.5}});
  LiveEdgeGraph live(g);
  live.set_present(0, true);
  live.set_present(2, true);  // 2->3 live but unreachable: 1->2 is down
  SeedSet reach = realized_reach(live, SeedSet{0});
  CHECK(reach.members() == std::vector<NodeId>{0, 1});
  CHECK(realized_spread(live, SeedSet{0}) == 2);
  live.set_present(1, true);
  CHECK(realized_spread(live, SeedSet{0}) == 4);
  CHECK(realized_spread(live, SeedSet{3}) == 1);
  CHECK_THROWS_AS(realized_reach(live, SeedSet{7}), Error);
}

TEST_CASE("seed set operations") {
  SeedSet s{2, 0};
  CHECK(s.size() == 2);
  CHECK(s.contains(0));
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(1));
  CHECK(s.members() == std::vector<NodeId>{0, 2});
  SeedSet t = s.with(1);
  CHECK(t.members() == std::vector<NodeId>{0, 1, 2});
  CHECK(s.size() == 2);  // with() does not mutate
  CHECK(SeedSet::from_mask(0b101).members() == std::vector<NodeId>{0, 2});
  CHECK(t.to_mask() == 0b111);
  SeedSet u = s.united(SeedSet{1, 2});
  CHECK(u.members() == std::vector<NodeId>{0, 1, 2});
}
