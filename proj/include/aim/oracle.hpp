#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "aim/enumeration.hpp"
#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/policies.hpp"
#include "aim/rng.hpp"
#include "aim/seed_set.hpp"

namespace aim {

struct OracleLimits {
  int max_nodes = 8;
  // Cap on observation histories the adaptive induction may touch.
  long long max_states = 300000;
  EnumLimits enum_limits{};
};

struct NonadaptiveOracleResult {
  double value = 0.0;
  SeedSet best;
};

// Materialized adaptive policy. Internal node i picks nodes[i].pick; child
// slot m covers the observation where exactly the out-edges of pick flagged
// in mask m (bit j = j-th out-edge in the graph's out-edge order) fired.
// A child of -1 ends the path; every root-leaf path has exactly k picks.
struct DecisionNode {
  NodeId pick = -1;
  std::vector<int> children;
};

struct DecisionTree {
  int k = 0;
  int root = -1;
  std::vector<DecisionNode> nodes;
};

struct AdaptiveOracleResult {
  double value = 0.0;
  DecisionTree tree;
};

struct GapReport {
  double opt_n = 0.0;
  double opt_a = 0.0;
  double gap = 0.0;
};

namespace detail {

// Positive-probability observation branches of seeding v: subsets of its
// 0 < p < 1 out-edges, with p = 1 edges always live and p = 0 edges dead.
// local_mask indexes v's out-edge positions (the decision-tree child slot);
// global_mask carries the same bits at whole-graph edge ids.
template <typename Fn>
void for_each_branch(const InfluenceGraph& g, NodeId v, Fn&& fn) {
  auto out = g.out_edges(v);
  std::uint32_t forced_local = 0;
  std::uint64_t forced_global = 0;
  std::vector<std::pair<int, double>> random;  // (position, prob)
  for (std::size_t i = 0; i < out.size(); ++i) {
    double p = g.edge(out[i]).prob;
    if (p >= 1.0) {
      forced_local |= std::uint32_t{1} << i;
      forced_global |= std::uint64_t{1} << out[i];
    } else if (p > 0.0) {
      random.emplace_back(static_cast<int>(i), p);
    }
  }
  int r = static_cast<int>(random.size());
  for (std::uint32_t m = 0; m < (std::uint32_t{1} << r); ++m) {
    double prob = 1.0;
    std::uint32_t local = forced_local;
    std::uint64_t global = forced_global;
    for (int i = 0; i < r; ++i) {
      auto [pos, p] = random[i];
      if ((m >> i) & 1) {
        prob *= p;
        local |= std::uint32_t{1} << pos;
        global |= std::uint64_t{1} << out[pos];
      } else {
        prob *= 1.0 - p;
      }
    }
    fn(prob, local, global);
  }
}

// Edge states after observing the picks in dom: their out-edges are pinned
// to the bits recorded in live, everything else keeps its probability.
inline EdgeStates states_for_history(const InfluenceGraph& g, std::uint32_t dom,
                                     std::uint64_t live) {
  EdgeStates states(g.edge_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (!((dom >> u) & 1)) continue;
    for (int e : g.out_edges(u)) {
      states.set(e, ((live >> e) & 1) ? EdgeState::Live : EdgeState::Dead);
    }
  }
  return states;
}

struct DpKey {
  std::uint32_t dom = 0;
  std::uint64_t live = 0;
  bool operator==(const DpKey&) const = default;
};

struct DpKeyHash {
  std::size_t operator()(const DpKey& k) const {
    return static_cast<std::size_t>(
        Rng::mix(k.live + 0x9e3779b97f4a7c15ULL) ^
        Rng::mix(static_cast<std::uint64_t>(k.dom) * 0xbf58476d1ce4e5b9ULL + 1));
  }
};

struct DpEntry {
  double value = 0.0;
  NodeId best = -1;
};

}  // namespace detail

// Upper bound on the observation histories the adaptive induction can touch:
// sum over domains D with |D| <= k of prod_{v in D} 2^outdeg(v). Covers the
// zero-probability branches visited during witness extraction. Saturates
// instead of overflowing.
inline long long adaptive_state_bound(const InfluenceGraph& g, int k) {
  constexpr long long kSaturated = 1LL << 62;
  int n = g.node_count();
  if (n > 24) return kSaturated;
  long long total = 0;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    if (std::popcount(mask) > k) continue;
    int bits = 0;
    for (NodeId v = 0; v < n; ++v) {
      if ((mask >> v) & 1) bits += g.out_degree(v);
    }
    if (bits >= 62) return kSaturated;
    total += 1LL << bits;
    if (total >= kSaturated) return kSaturated;
  }
  return total;
}

// Best seed set of size exactly k by exhaustive enumeration; ties resolve to
// the lexicographically smallest set.
inline NonadaptiveOracleResult opt_nonadaptive(const InfluenceGraph& g, int k,
                                               const OracleLimits& limits = {}) {
  if (k < 1 || k > g.node_count()) throw Error("budget k must satisfy 1 <= k <= n");
  if (g.node_count() > limits.max_nodes) {
    throw EnumerationTooLarge("oracle nodes", g.node_count(), limits.max_nodes);
  }
  CachedReach cache(g, limits.enum_limits);
  EdgeStates states(g.edge_count());
  NonadaptiveOracleResult result;
  result.value = -std::numeric_limits<double>::infinity();
  std::vector<NodeId> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  for (;;) {
    SeedSet seeds(comb);
    double value = cache.expected_reach(states, seeds);
    if (value > result.value) {
      result.value = value;
      result.best = seeds;
    }
    int i = k - 1;
    while (i >= 0 && comb[i] == g.node_count() - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
  return result;
}

// Optimal adaptive value by backward induction over observation histories,
// plus the argmax decision tree. Histories are keyed by the unordered
// (picked set, observed out-edge bits) pair: observations of distinct seeds
// concern disjoint edge sets, so the conditional value does not depend on
// pick order. Ties resolve to the smallest node id.
inline AdaptiveOracleResult opt_adaptive(const InfluenceGraph& g, int k,
                                         const OracleLimits& limits = {}) {
  int n = g.node_count();
  if (k < 1 || k > n) throw Error("budget k must satisfy 1 <= k <= n");
  if (n > limits.max_nodes) throw EnumerationTooLarge("oracle nodes", n, limits.max_nodes);
  long long bound = adaptive_state_bound(g, k);
  if (bound > limits.max_states) {
    throw EnumerationTooLarge("adaptive oracle states", bound, limits.max_states);
  }
  CachedReach cache(g, limits.enum_limits);
  std::unordered_map<detail::DpKey, detail::DpEntry, detail::DpKeyHash> memo;
  auto solve = [&](auto&& self, std::uint32_t dom, std::uint64_t live, int depth)
      -> detail::DpEntry {
    detail::DpKey key{dom, live};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    detail::DpEntry entry;
    if (depth == k) {
      EdgeStates states = detail::states_for_history(g, dom, live);
      entry.value = cache.expected_reach(states, dom);
    } else {
      entry.value = -std::numeric_limits<double>::infinity();
      for (NodeId v = 0; v < n; ++v) {
        if ((dom >> v) & 1) continue;
        double expected = 0.0;
        detail::for_each_branch(g, v, [&](double prob, std::uint32_t, std::uint64_t global) {
          expected +=
              prob * self(self, dom | (std::uint32_t{1} << v), live | global, depth + 1).value;
        });
        if (expected > entry.value) {
          entry.value = expected;
          entry.best = v;
        }
      }
    }
    memo.emplace(key, entry);
    return entry;
  };
  detail::DpEntry root = solve(solve, 0, 0, 0);

  AdaptiveOracleResult result;
  result.value = root.value;
  result.tree.k = k;
  // Materialize the argmax tree in preorder. Every branch gets a child,
  // including zero-probability observations (a p = 1 edge seen dead, or
  // p = 0 seen live): their subtrees make the same induction decisions,
  // conditioning future spread on the pinned bits as observed.
  auto build = [&](auto&& self, std::uint32_t dom, std::uint64_t live, int depth) -> int {
    detail::DpEntry entry = solve(solve, dom, live, depth);
    int index = static_cast<int>(result.tree.nodes.size());
    if (static_cast<long long>(index) >= 4 * limits.max_states) {
      throw EnumerationTooLarge("witness tree nodes", static_cast<long long>(index) + 1,
                                4 * limits.max_states);
    }
    result.tree.nodes.push_back({entry.best, {}});
    auto out = g.out_edges(entry.best);
    int deg = static_cast<int>(out.size());
    std::vector<int> children(std::size_t{1} << deg, -1);
    if (depth + 1 < k) {
      for (std::uint32_t m = 0; m < (std::uint32_t{1} << deg); ++m) {
        std::uint64_t bits = 0;
        for (int i = 0; i < deg; ++i) {
          if ((m >> i) & 1) bits |= std::uint64_t{1} << out[i];
        }
        children[m] = self(self, dom | (std::uint32_t{1} << entry.best), live | bits, depth + 1);
      }
    }
    result.tree.nodes[static_cast<std::size_t>(index)].children = std::move(children);
    return index;
  };
  result.tree.root = build(build, 0, 0, 0);
  return result;
}

inline GapReport adaptivity_gap(const InfluenceGraph& g, int k, const OracleLimits& limits = {}) {
  GapReport report;
  report.opt_n = opt_nonadaptive(g, k, limits).value;
  report.opt_a = opt_adaptive(g, k, limits).value;
  report.gap = report.opt_a / report.opt_n;
  return report;
}

// Structural validation: every node reachable exactly once, branch counts
// matching out-degrees, no repeated pick on a path, and every path ending
// exactly at depth k.
inline void validate_tree(const InfluenceGraph& g, const DecisionTree& tree) {
  if (tree.k < 1 || tree.k > g.node_count()) {
    throw MalformedTree("tree budget outside [1, n]");
  }
  if (tree.root < 0 || tree.root >= static_cast<int>(tree.nodes.size())) {
    throw MalformedTree("tree root index out of range");
  }
  std::vector<char> visited(tree.nodes.size(), 0);
  auto dfs = [&](auto&& self, int index, int depth, std::uint32_t path) -> void {
    if (index < 0 || index >= static_cast<int>(tree.nodes.size())) {
      throw MalformedTree("child index out of range");
    }
    if (visited[static_cast<std::size_t>(index)]++) {
      throw MalformedTree("node reachable along two paths");
    }
    const DecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
    if (node.pick < 0 || node.pick >= g.node_count()) {
      throw MalformedTree("pick is not a valid node id");
    }
    if ((path >> node.pick) & 1) throw MalformedTree("seed repeated along a path");
    std::size_t expected = std::size_t{1} << g.out_degree(node.pick);
    if (node.children.size() != expected) {
      throw MalformedTree("branch count does not match 2^outdeg of the pick");
    }
    for (int child : node.children) {
      if (depth + 1 == tree.k) {
        if (child != -1) throw MalformedTree("path exceeds the tree budget");
      } else {
        if (child == -1) throw MalformedTree("path ends before the tree budget");
        self(self, child, depth + 1, path | (std::uint32_t{1} << node.pick));
      }
    }
  };
  dfs(dfs, tree.root, 0, 0);
  for (char v : visited) {
    if (!v) throw MalformedTree("tree contains unreachable nodes");
  }
}

// Exact expected spread of the tree-encoded policy, by summing over
// positive-probability observation branches; cross-validates the induction
// value through an independent evaluation path.
inline double evaluate_decision_tree(const InfluenceGraph& g, const DecisionTree& tree,
                                     const EnumLimits& limits = {}) {
  validate_tree(g, tree);
  CachedReach cache(g, limits);
  auto walk = [&](auto&& self, int index, std::uint32_t dom, std::uint64_t live,
                  double prob) -> double {
    const DecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
    double total = 0.0;
    detail::for_each_branch(g, node.pick,
                            [&](double p, std::uint32_t local, std::uint64_t global) {
      std::uint32_t next_dom = dom | (std::uint32_t{1} << node.pick);
      std::uint64_t next_live = live | global;
      int child = node.children[local];
      if (child == -1) {
        EdgeStates states = detail::states_for_history(g, next_dom, next_live);
        total += prob * p * cache.expected_reach(states, next_dom);
      } else {
        total += self(self, child, next_dom, next_live, prob * p);
      }
    });
    return total;
  };
  return walk(walk, tree.root, 0, 0, 1.0);
}

// Behavioral view of a decision tree; g and tree must outlive the policy.
inline AdaptivePolicy tree_policy(const InfluenceGraph& g, const DecisionTree& tree) {
  validate_tree(g, tree);
  AdaptivePolicy policy;
  policy.budget = tree.k;
  policy.pick = [&g, &tree](const PartialRealisation& psi) -> NodeId {
    int index = tree.root;
    for (;;) {
      const DecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
      const std::vector<NodeId>* observed = psi.observation(node.pick);
      if (observed == nullptr) return node.pick;
      auto out = g.out_edges(node.pick);
      std::uint32_t mask = 0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (std::binary_search(observed->begin(), observed->end(), g.edge(out[i]).target)) {
          mask |= std::uint32_t{1} << i;
        }
      }
      index = node.children[mask];
      if (index == -1) throw PolicyViolation("decision tree exhausted before its budget");
    }
  };
  return policy;
}

}  // namespace aim
