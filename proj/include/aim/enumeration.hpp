#pragma once

#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/seed_set.hpp"

namespace aim {

// Budget for exact enumeration, counted in effective binary choices: edges
// whose evaluation probability is strictly inside (0, 1). Edges pinned to 0
// or 1 cost nothing.
struct EnumLimits {
  int max_free_bits = 20;
};

// Per-edge evaluation state for expected-reach computations.
//   Dead    edge removed (conditioned out / never live)
//   Live    edge forced present (conditioned in / probability 1)
//   Free    edge live with its own probability p
//   Boosted edge live with probability 1 - (1-p)^2, i.e. two independent
//           chances, used when the edge's source gets a second activation
//           attempt
enum class EdgeState : unsigned char { Dead, Live, Free, Boosted };

class EdgeStates {
 public:
  explicit EdgeStates(int edge_count) : states_(edge_count, EdgeState::Free) {}

  EdgeState get(int e) const { return states_[e]; }
  void set(int e, EdgeState s) { states_[e] = s; }
  int size() const { return static_cast<int>(states_.size()); }

  bool operator==(const EdgeStates&) const = default;

 private:
  std::vector<EdgeState> states_;
};

inline double effective_prob(EdgeState s, double p) {
  switch (s) {
    case EdgeState::Dead:
      return 0.0;
    case EdgeState::Live:
      return 1.0;
    case EdgeState::Free:
      return p;
    case EdgeState::Boosted:
      return 1.0 - (1.0 - p) * (1.0 - p);
  }
  return 0.0;
}

// Bitmask reachability engine for graphs small enough for exact work
// (n <= 32 nodes, |E| <= 64 edges). All exact operations funnel through
// expected_reach: the expected number of nodes reachable from a seed set when
// every edge is live independently with its effective probability.
class MaskKernel {
 public:
  explicit MaskKernel(const InfluenceGraph& g) : g_(&g) {
    if (g.node_count() > 32) throw EnumerationTooLarge("node mask bits", g.node_count(), 32);
    if (g.edge_count() > 64) throw EnumerationTooLarge("edge mask bits", g.edge_count(), 64);
    out_start_.assign(g.node_count() + 1, 0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
      out_start_[u + 1] = out_start_[u] + g.out_degree(u);
      for (int e : g.out_edges(u)) {
        edge_id_.push_back(e);
        target_bit_.push_back(std::uint32_t{1} << g.edge(e).target);
      }
    }
  }

  const InfluenceGraph& graph() const { return *g_; }

  std::uint32_t reach_mask(std::uint64_t live, std::uint32_t seeds) const {
    std::uint32_t active = seeds;
    std::uint32_t frontier = seeds;
    while (frontier != 0) {
      NodeId u = std::countr_zero(frontier);
      frontier &= frontier - 1;
      for (int i = out_start_[u]; i < out_start_[u + 1]; ++i) {
        if ((live >> edge_id_[i]) & 1) {
          std::uint32_t bit = target_bit_[i];
          if (!(active & bit)) {
            active |= bit;
            frontier |= bit;
          }
        }
      }
    }
    return active;
  }

  int spread(std::uint64_t live, std::uint32_t seeds) const {
    return std::popcount(reach_mask(live, seeds));
  }

  // Sum over assignments of the free edges of P[assignment] * |reach|.
  double expected_reach(const EdgeStates& states, std::uint32_t seeds,
                        const EnumLimits& limits = {}) const {
    std::uint64_t forced_live = 0;
    std::vector<std::pair<int, double>> free_edges;
    for (int e = 0; e < g_->edge_count(); ++e) {
      double p = effective_prob(states.get(e), g_->edge(e).prob);
      if (p >= 1.0) {
        forced_live |= std::uint64_t{1} << e;
      } else if (p > 0.0) {
        free_edges.emplace_back(e, p);
      }
    }
    if (static_cast<int>(free_edges.size()) > limits.max_free_bits) {
      throw EnumerationTooLarge("free edge bits", static_cast<long long>(free_edges.size()),
                                limits.max_free_bits);
    }
    double total = 0.0;
    enumerate(free_edges, 0, 1.0, forced_live, seeds, total);
    return total;
  }

 private:
  void enumerate(const std::vector<std::pair<int, double>>& free_edges, std::size_t i,
                 double prob, std::uint64_t live, std::uint32_t seeds, double& total) const {
    if (i == free_edges.size()) {
      total += prob * spread(live, seeds);
      return;
    }
    auto [e, p] = free_edges[i];
    enumerate(free_edges, i + 1, prob * (1.0 - p), live, seeds, total);
    enumerate(free_edges, i + 1, prob * p, live | (std::uint64_t{1} << e), seeds, total);
  }

  const InfluenceGraph* g_;
  std::vector<int> out_start_;
  std::vector<int> edge_id_;
  std::vector<std::uint32_t> target_bit_;
};

// Memoizing wrapper around MaskKernel::expected_reach. The verification
// checks evaluate the same (edge states, seeds) configuration many times
// across nested loops; the cache makes those loops cheap. Single-threaded by
// design: share one instance per worker, not across workers.
class CachedReach {
 public:
  explicit CachedReach(const InfluenceGraph& g, EnumLimits limits = {})
      : kernel_(g), limits_(limits) {}

  const MaskKernel& kernel() const { return kernel_; }
  const EnumLimits& limits() const { return limits_; }

  double expected_reach(const EdgeStates& states, const SeedSet& seeds) {
    return expected_reach(states, static_cast<std::uint32_t>(seeds.to_mask()));
  }

  double expected_reach(const EdgeStates& states, std::uint32_t seed_mask) {
    Key key = pack(states, seed_mask);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double value = kernel_.expected_reach(states, seed_mask, limits_);
    cache_.emplace(key, value);
    return value;
  }

 private:
  struct Key {
    std::uint64_t lo;
    std::uint64_t hi;
    std::uint32_t seeds;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = Rng::mix(k.lo ^ 0x9e3779b97f4a7c15ULL) ^ Rng::mix(k.hi) ^
                        Rng::mix(static_cast<std::uint64_t>(k.seeds) << 17);
      return static_cast<std::size_t>(h);
    }
  };

  Key pack(const EdgeStates& states, std::uint32_t seed_mask) const {
    // 2 bits per edge; <= 64 edges fill lo then hi.
    Key key{0, 0, seed_mask};
    int m = states.size();
    for (int e = 0; e < m && e < 32; ++e) {
      key.lo |= static_cast<std::uint64_t>(states.get(e)) << (2 * e);
    }
    for (int e = 32; e < m; ++e) {
      key.hi |= static_cast<std::uint64_t>(states.get(e)) << (2 * (e - 32));
    }
    return key;
  }

  MaskKernel kernel_;
  EnumLimits limits_;
  std::unordered_map<Key, double, KeyHash> cache_;
};

}  // namespace aim
