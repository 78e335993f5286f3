#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "aim/enumeration.hpp"
#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/realisation.hpp"
#include "aim/rng.hpp"
#include "aim/seed_set.hpp"

namespace aim {

// Monte Carlo estimate with a normal-approximation 95% half-width.
struct SpreadEstimate {
  double mean = 0.0;
  int samples = 0;
  double half_width = 0.0;
};

// A base live-edge draw plus an independent shadow draw. The shadow copy of
// an edge only matters when the edge's source gets a second activation
// chance.
struct LivePair {
  LiveEdgeGraph base;
  LiveEdgeGraph shadow;
};

inline LivePair sample_live_pair(const InfluenceGraph& g, Rng& rng) {
  LiveEdgeGraph base = sample_live_edge(g, rng);
  LiveEdgeGraph shadow = sample_live_edge(g, rng);
  return LivePair{std::move(base), std::move(shadow)};
}

// Union graph in which every seed's out-edges take their second chance: an
// edge is present if it is present in the base draw, or its source is a seed
// and it is present in the shadow draw.
inline LiveEdgeGraph two_level_graph(const LivePair& pair, const SeedSet& seeds) {
  const InfluenceGraph& g = pair.base.parent();
  LiveEdgeGraph result = pair.base;
  for (NodeId u : seeds) {
    for (int e : g.out_edges(u)) {
      if (pair.shadow.present(e)) result.set_present(e, true);
    }
  }
  return result;
}

// sigma(S): expected reach over independent live-edge draws, by exact
// enumeration of the free edges.
inline double exact_spread(const InfluenceGraph& g, const SeedSet& seeds,
                           const EnumLimits& limits = {}) {
  MaskKernel kernel(g);
  EdgeStates states(g.edge_count());
  return kernel.expected_reach(states, static_cast<std::uint32_t>(seeds.to_mask()), limits);
}

inline SpreadEstimate estimate_spread(const InfluenceGraph& g, const SeedSet& seeds, int samples,
                                      std::uint64_t seed) {
  if (samples <= 0) throw Error("sample count must be positive");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
    LiveEdgeGraph live = sample_live_edge(g, rng);
    double x = realized_spread(live, seeds);
    sum += x;
    sum_sq += x * x;
  }
  SpreadEstimate est;
  est.samples = samples;
  est.mean = sum / samples;
  if (samples > 1) {
    double var = (sum_sq - sum * sum / samples) / (samples - 1);
    if (var < 0.0) var = 0.0;  // guard rounding
    est.half_width = 1.96 * std::sqrt(var / samples);
  }
  return est;
}

namespace detail {

// Edge states with every edge whose source lies in `boosted` given a second
// chance. Only edges still Free are upgraded; conditioned edges stay fixed.
inline void boost_sources(const InfluenceGraph& g, EdgeStates& states, const SeedSet& boosted) {
  for (NodeId u : boosted) {
    for (int e : g.out_edges(u)) {
      if (states.get(e) == EdgeState::Free) states.set(e, EdgeState::Boosted);
    }
  }
}

// Pin every edge leaving an observed seed to its observed outcome.
inline EdgeStates states_for_conditional(const InfluenceGraph& g, const PartialRealisation& psi) {
  psi.validate_against(g);
  EdgeStates states(g.edge_count());
  for (const PartialRealisation::Entry& entry : psi.entries()) {
    for (int e : g.out_edges(entry.seed)) {
      bool live = std::binary_search(entry.observed.begin(), entry.observed.end(),
                                     g.edge(e).target);
      states.set(e, live ? EdgeState::Live : EdgeState::Dead);
    }
  }
  return states;
}

}  // namespace detail

// sigma^2(S): every seed's out-edges get two independent chances. Evaluated
// in the boosted-probability form, which needs one bit per free edge.
inline double exact_two_level_spread(const InfluenceGraph& g, const SeedSet& seeds,
                                     const EnumLimits& limits = {}) {
  MaskKernel kernel(g);
  EdgeStates states(g.edge_count());
  detail::boost_sources(g, states, seeds);
  return kernel.expected_reach(states, static_cast<std::uint32_t>(seeds.to_mask()), limits);
}

// Same quantity by joint enumeration of (base, shadow) bits: two bits per
// free seed-out edge, one per other free edge. Kept as an independent route
// for cross-validation of the boosted-probability algebra.
inline double exact_two_level_spread_joint(const InfluenceGraph& g, const SeedSet& seeds,
                                           const EnumLimits& limits = {}) {
  MaskKernel kernel(g);
  std::uint32_t seed_mask = static_cast<std::uint32_t>(seeds.to_mask());
  struct Choice {
    int edge;
    double p;
    bool doubled;
  };
  std::uint64_t forced_live = 0;
  std::vector<Choice> free_edges;
  long long bits = 0;
  for (int e = 0; e < g.edge_count(); ++e) {
    double p = g.edge(e).prob;
    bool seed_out = seeds.contains(g.edge(e).source);
    if (p >= 1.0) {
      forced_live |= std::uint64_t{1} << e;
    } else if (p > 0.0) {
      free_edges.push_back(Choice{e, p, seed_out});
      bits += seed_out ? 2 : 1;
    }
  }
  if (bits > limits.max_free_bits) {
    throw EnumerationTooLarge("joint free edge bits", bits, limits.max_free_bits);
  }
  double total = 0.0;
  auto rec = [&](auto&& self, std::size_t i, double prob, std::uint64_t live) -> void {
    if (i == free_edges.size()) {
      total += prob * kernel.spread(live, seed_mask);
      return;
    }
    const Choice& c = free_edges[i];
    std::uint64_t bit = std::uint64_t{1} << c.edge;
    if (!c.doubled) {
      self(self, i + 1, prob * (1.0 - c.p), live);
      self(self, i + 1, prob * c.p, live | bit);
    } else {
      double q = 1.0 - c.p;
      self(self, i + 1, prob * q * q, live);            // base dead, shadow dead
      self(self, i + 1, prob * q * c.p, live | bit);    // base dead, shadow live
      self(self, i + 1, prob * c.p * q, live | bit);    // base live, shadow dead
      self(self, i + 1, prob * c.p * c.p, live | bit);  // base live, shadow live
    }
  };
  rec(rec, 0, 1.0, forced_live);
  return total;
}

// Delta_S(v) = sigma(S + v) - sigma(S); zero when v is already in S.
inline double marginal_gain(const InfluenceGraph& g, const SeedSet& seeds, NodeId v,
                            const EnumLimits& limits = {}) {
  if (seeds.contains(v)) return 0.0;
  MaskKernel kernel(g);
  EdgeStates states(g.edge_count());
  std::uint32_t base_mask = static_cast<std::uint32_t>(seeds.to_mask());
  std::uint32_t with_mask = base_mask | (std::uint32_t{1} << v);
  return kernel.expected_reach(states, with_mask, limits) -
         kernel.expected_reach(states, base_mask, limits);
}

// Monte Carlo marginal with common random numbers: both spreads are measured
// on the same live-edge draw, sample by sample.
inline double marginal_gain_mc(const InfluenceGraph& g, const SeedSet& seeds, NodeId v,
                               int samples, std::uint64_t seed) {
  if (samples <= 0) throw Error("sample count must be positive");
  if (seeds.contains(v)) return 0.0;
  SeedSet with = seeds.with(v);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(i));
    LiveEdgeGraph live = sample_live_edge(g, rng);
    sum += realized_spread(live, with) - realized_spread(live, seeds);
  }
  return sum / samples;
}

// Delta^2_S(v): the gain of adding v when v alone takes its second chance.
// Both terms are measured in the same graph (v's out-edges doubled), so the
// value is the expected number of nodes v newly activates and is zero
// whenever S already reaches v. Seeds in S keep single chances.
inline double two_level_marginal(const InfluenceGraph& g, const SeedSet& seeds, NodeId v,
                                 const EnumLimits& limits = {}) {
  if (seeds.contains(v)) return 0.0;
  MaskKernel kernel(g);
  std::uint32_t base_mask = static_cast<std::uint32_t>(seeds.to_mask());
  EdgeStates boosted(g.edge_count());
  detail::boost_sources(g, boosted, SeedSet{v});
  return kernel.expected_reach(boosted, base_mask | (std::uint32_t{1} << v), limits) -
         kernel.expected_reach(boosted, base_mask, limits);
}

// Joint-enumeration route for Delta^2_S(v): one bit per free edge plus a
// shadow bit per free out-edge of v.
inline double two_level_marginal_joint(const InfluenceGraph& g, const SeedSet& seeds, NodeId v,
                                       const EnumLimits& limits = {}) {
  if (seeds.contains(v)) return 0.0;
  MaskKernel kernel(g);
  std::uint32_t base_mask = static_cast<std::uint32_t>(seeds.to_mask());
  std::uint32_t with_mask = base_mask | (std::uint32_t{1} << v);
  struct Choice {
    int edge;
    double p;
    bool doubled;
  };
  std::uint64_t forced_live = 0;
  std::vector<Choice> free_edges;
  long long bits = 0;
  for (int e = 0; e < g.edge_count(); ++e) {
    double p = g.edge(e).prob;
    bool from_v = g.edge(e).source == v;
    if (p >= 1.0) {
      forced_live |= std::uint64_t{1} << e;
    } else if (p > 0.0) {
      free_edges.push_back(Choice{e, p, from_v});
      bits += from_v ? 2 : 1;
    }
  }
  if (bits > limits.max_free_bits) {
    throw EnumerationTooLarge("joint free edge bits", bits, limits.max_free_bits);
  }
  double total = 0.0;
  auto rec = [&](auto&& self, std::size_t i, double prob, std::uint64_t union_live) -> void {
    if (i == free_edges.size()) {
      total += prob * (kernel.spread(union_live, with_mask) - kernel.spread(union_live, base_mask));
      return;
    }
    const Choice& c = free_edges[i];
    std::uint64_t bit = std::uint64_t{1} << c.edge;
    double q = 1.0 - c.p;
    if (!c.doubled) {
      self(self, i + 1, prob * q, union_live);
      self(self, i + 1, prob * c.p, union_live | bit);
    } else {
      self(self, i + 1, prob * q * q, union_live);
      self(self, i + 1, prob * q * c.p, union_live | bit);
      self(self, i + 1, prob * c.p * q, union_live | bit);
      self(self, i + 1, prob * c.p * c.p, union_live | bit);
    }
  };
  rec(rec, 0, 1.0, forced_live);
  return total;
}

// E[sigma_L(dom(psi) + extra) | psi]: edges out of observed seeds are pinned
// to their observed outcomes, everything else stays independent.
inline double conditional_spread(const InfluenceGraph& g, const PartialRealisation& psi,
                                 const SeedSet& extra, const EnumLimits& limits = {}) {
  MaskKernel kernel(g);
  EdgeStates states = detail::states_for_conditional(g, psi);
  SeedSet seeds = psi.domain().united(extra);
  return kernel.expected_reach(states, static_cast<std::uint32_t>(seeds.to_mask()), limits);
}

// Conditional two-level spread in which only the seeds NOT yet observed (the
// members of `extra` outside dom(psi)) take second chances; observed seeds
// already spent theirs.
inline double strong_two_level_conditional_spread(const InfluenceGraph& g,
                                                  const PartialRealisation& psi,
                                                  const SeedSet& extra,
                                                  const EnumLimits& limits = {}) {
  MaskKernel kernel(g);
  EdgeStates states = detail::states_for_conditional(g, psi);
  SeedSet dom = psi.domain();
  std::vector<NodeId> fresh;
  for (NodeId v : extra) {
    if (!dom.contains(v)) fresh.push_back(v);
  }
  detail::boost_sources(g, states, SeedSet(std::move(fresh)));
  SeedSet seeds = dom.united(extra);
  return kernel.expected_reach(states, static_cast<std::uint32_t>(seeds.to_mask()), limits);
}

}  // namespace aim
