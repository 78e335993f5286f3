#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aim/diffusion.hpp"
#include "aim/enumeration.hpp"
#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/realisation.hpp"
#include "aim/rng.hpp"
#include "aim/seed_set.hpp"

namespace aim {

struct GreedyTrace {
  std::vector<NodeId> seeds;   // selection order
  std::vector<double> values;  // objective value after each prefix
};

// x[v] = probability that a policy selects v, over live-edge randomness.
struct SelectionProbabilities {
  std::vector<double> x;

  double sum() const {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
};

// Seed-set objective used by the non-adaptive greedy loop.
class SpreadEvaluator {
 public:
  virtual ~SpreadEvaluator() = default;
  virtual double value(const SeedSet& seeds) const = 0;
};

class ExactSpreadEvaluator final : public SpreadEvaluator {
 public:
  explicit ExactSpreadEvaluator(const InfluenceGraph& g, EnumLimits limits = {})
      : cache_(std::make_unique<CachedReach>(g, limits)), states_(g.edge_count()) {}

  double value(const SeedSet& seeds) const override {
    return cache_->expected_reach(states_, seeds);
  }

 private:
  mutable std::unique_ptr<CachedReach> cache_;
  EdgeStates states_;
};

// Monte Carlo evaluator over one frozen batch of live-edge draws, so every
// candidate (and every greedy iteration) sees identical randomness. Realized
// spread is monotone per draw, which keeps greedy traces non-decreasing.
class FrozenBatchEvaluator final : public SpreadEvaluator {
 public:
  FrozenBatchEvaluator(const InfluenceGraph& g, int samples, std::uint64_t master_seed) {
    if (samples <= 0) throw Error("sample count must be positive");
    batch_.reserve(samples);
    for (int i = 0; i < samples; ++i) {
      Rng rng = Rng::derive(master_seed, static_cast<std::uint64_t>(i));
      batch_.push_back(sample_live_edge(g, rng));
    }
  }

  double value(const SeedSet& seeds) const override {
    double sum = 0.0;
    for (const LiveEdgeGraph& live : batch_) sum += realized_spread(live, seeds);
    return sum / static_cast<double>(batch_.size());
  }

 private:
  std::vector<LiveEdgeGraph> batch_;
};

// Greedy seed selection: k rounds of best marginal candidate, ties broken by
// smallest node id (strict improvement required, so the first maximum wins).
inline GreedyTrace nonadaptive_greedy(const InfluenceGraph& g, int k,
                                      const SpreadEvaluator& evaluator) {
  if (k < 1 || k > g.node_count()) throw Error("budget k must satisfy 1 <= k <= n");
  GreedyTrace trace;
  SeedSet seeds;
  for (int t = 0; t < k; ++t) {
    NodeId best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (seeds.contains(v)) continue;
      double value = evaluator.value(seeds.with(v));
      if (value > best_value) {
        best_value = value;
        best = v;
      }
    }
    seeds.insert(best);
    trace.seeds.push_back(best);
    trace.values.push_back(best_value);
  }
  return trace;
}

// An adaptive policy is its budget plus a pure decision rule mapping the
// current partial realisation to the next seed. The rule is only consulted
// while |dom(psi)| < budget; replays must be exact, so rules may cache but
// must not depend on call order.
struct AdaptivePolicy {
  int budget = 0;
  std::function<NodeId(const PartialRealisation&)> pick;
};

inline AdaptivePolicy constant_policy(const std::vector<NodeId>& order) {
  SeedSet distinct(order);
  if (distinct.size() != static_cast<int>(order.size())) {
    throw Error("constant policy order contains duplicates");
  }
  AdaptivePolicy policy;
  policy.budget = static_cast<int>(order.size());
  policy.pick = [order](const PartialRealisation& psi) { return order[psi.size()]; };
  return policy;
}

// Runs the policy to its budget on one live-edge draw, recording myopic
// observations after every selection.
inline PartialRealisation run_policy(const AdaptivePolicy& policy, const LiveEdgeGraph& live) {
  const InfluenceGraph& g = live.parent();
  if (policy.budget < 0 || policy.budget > g.node_count()) {
    throw PolicyViolation("policy budget outside [0, n]");
  }
  PartialRealisation psi;
  for (int t = 0; t < policy.budget; ++t) {
    NodeId v = policy.pick(psi);
    if (v < 0 || v >= g.node_count()) throw PolicyViolation("policy picked an invalid node id");
    if (psi.contains(v)) {
      throw PolicyViolation("policy picked node " + std::to_string(v) + " twice");
    }
    psi.add(v, observe(live, v));
  }
  return psi;
}

struct ExactMode {
  EnumLimits limits{};
};
struct McMode {
  int samples = 10000;
  std::uint64_t seed = 0;
};

namespace detail {

// Enumerates live-edge draws with positive probability; edges with p = 1 are
// pinned present, edges with p = 0 absent. Calls fn(prob, live) per draw.
template <typename Fn>
void for_each_live_graph(const InfluenceGraph& g, const EnumLimits& limits, Fn&& fn) {
  std::vector<std::pair<int, double>> free_edges;
  LiveEdgeGraph live(g);
  for (int e = 0; e < g.edge_count(); ++e) {
    double p = g.edge(e).prob;
    if (p >= 1.0) {
      live.set_present(e, true);
    } else if (p > 0.0) {
      free_edges.emplace_back(e, p);
    }
  }
  if (static_cast<int>(free_edges.size()) > limits.max_free_bits) {
    throw EnumerationTooLarge("free edge bits", static_cast<long long>(free_edges.size()),
                              limits.max_free_bits);
  }
  auto rec = [&](auto&& self, std::size_t i, double prob) -> void {
    if (i == free_edges.size()) {
      fn(prob, live);
      return;
    }
    auto [e, p] = free_edges[i];
    self(self, i + 1, prob * (1.0 - p));
    live.set_present(e, true);
    self(self, i + 1, prob * p);
    live.set_present(e, false);
  };
  rec(rec, 0, 1.0);
}

// Myopic observation structure of one node: out-edges pinned live/dead by
// degenerate probabilities plus the genuinely random ones.
struct NodeObservations {
  std::vector<NodeId> forced_observed;         // node itself + targets of p=1 edges
  std::vector<std::pair<int, double>> random;  // (edge id, prob) with 0 < p < 1
};

inline NodeObservations node_observations(const InfluenceGraph& g, NodeId v) {
  NodeObservations obs;
  obs.forced_observed.push_back(v);
  for (int e : g.out_edges(v)) {
    double p = g.edge(e).prob;
    if (p >= 1.0) {
      obs.forced_observed.push_back(g.edge(e).target);
    } else if (p > 0.0) {
      obs.random.emplace_back(e, p);
    }
  }
  return obs;
}

// Calls fn(prob, observed_nodes, live_edge_mask) for every positive-
// probability myopic observation of v.
template <typename Fn>
void for_each_observation(const InfluenceGraph& g, NodeId v, Fn&& fn) {
  NodeObservations obs = node_observations(g, v);
  int r = static_cast<int>(obs.random.size());
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << r); ++mask) {
    double prob = 1.0;
    std::vector<NodeId> observed = obs.forced_observed;
    std::uint64_t live_mask = 0;
    for (int i = 0; i < r; ++i) {
      auto [e, p] = obs.random[i];
      if ((mask >> i) & 1) {
        prob *= p;
        observed.push_back(g.edge(e).target);
        live_mask |= std::uint64_t{1} << e;
      } else {
        prob *= 1.0 - p;
      }
    }
    std::sort(observed.begin(), observed.end());
    fn(prob, std::move(observed), live_mask);
  }
}

}  // namespace detail

// Exact policy value: sum over positive-probability live-edge draws of
// P[draw] * realized spread of the seeds the policy picks on that draw.
inline double evaluate_policy(const InfluenceGraph& g, const AdaptivePolicy& policy,
                              const ExactMode& mode) {
  double total = 0.0;
  detail::for_each_live_graph(g, mode.limits, [&](double prob, const LiveEdgeGraph& live) {
    PartialRealisation psi = run_policy(policy, live);
    total += prob * realized_spread(live, psi.domain());
  });
  return total;
}

inline SpreadEstimate evaluate_policy(const InfluenceGraph& g, const AdaptivePolicy& policy,
                                      const McMode& mode) {
  if (mode.samples <= 0) throw Error("sample count must be positive");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < mode.samples; ++i) {
    Rng rng = Rng::derive(mode.seed, static_cast<std::uint64_t>(i));
    LiveEdgeGraph live = sample_live_edge(g, rng);
    PartialRealisation psi = run_policy(policy, live);
    double x = realized_spread(live, psi.domain());
    sum += x;
    sum_sq += x * x;
  }
  SpreadEstimate est;
  est.samples = mode.samples;
  est.mean = sum / mode.samples;
  if (mode.samples > 1) {
    double var = (sum_sq - sum * sum / mode.samples) / (mode.samples - 1);
    if (var < 0.0) var = 0.0;
    est.half_width = 1.96 * std::sqrt(var / mode.samples);
  }
  return est;
}

// Same expectation, computed by walking the observation tree instead of
// enumerating whole live-edge draws: observations of distinct seeds touch
// disjoint edge sets, so branch probabilities multiply and the leaf value is
// the conditional spread given the accumulated realisation. Cross-validates
// evaluate_policy and is much cheaper when most edges never get observed.
inline double evaluate_policy_via_observations(const InfluenceGraph& g,
                                               const AdaptivePolicy& policy,
                                               const EnumLimits& limits = {}) {
  CachedReach cache(g, limits);
  auto walk = [&](auto&& self, const PartialRealisation& psi, int bits_used) -> double {
    if (psi.size() == policy.budget) {
      EdgeStates states = detail::states_for_conditional(g, psi);
      return cache.expected_reach(states, psi.domain());
    }
    NodeId v = policy.pick(psi);
    if (v < 0 || v >= g.node_count()) throw PolicyViolation("policy picked an invalid node id");
    if (psi.contains(v)) throw PolicyViolation("policy picked node " + std::to_string(v) + " twice");
    detail::NodeObservations obs = detail::node_observations(g, v);
    int r = static_cast<int>(obs.random.size());
    if (bits_used + r > limits.max_free_bits) {
      throw EnumerationTooLarge("observation branch bits", bits_used + r, limits.max_free_bits);
    }
    double total = 0.0;
    detail::for_each_observation(g, v, [&](double prob, std::vector<NodeId> observed,
                                           std::uint64_t) {
      PartialRealisation child = psi;
      child.add(v, std::move(observed));
      total += prob * self(self, child, bits_used + r);
    });
    return total;
  };
  return walk(walk, PartialRealisation{}, 0);
}

// Exact selection probabilities of a policy, by live-edge enumeration.
inline SelectionProbabilities selection_probabilities(const InfluenceGraph& g,
                                                      const AdaptivePolicy& policy,
                                                      const EnumLimits& limits = {}) {
  SelectionProbabilities result;
  result.x.assign(g.node_count(), 0.0);
  detail::for_each_live_graph(g, limits, [&](double prob, const LiveEdgeGraph& live) {
    PartialRealisation psi = run_policy(policy, live);
    for (const auto& entry : psi.entries()) result.x[entry.seed] += prob;
  });
  return result;
}

// Adaptive greedy: next seed maximizes the conditional marginal spread given
// everything observed so far; ties go to the smallest node id. Decisions are
// memoized per realisation, so replays are exact.
inline AdaptivePolicy adaptive_greedy(const InfluenceGraph& g, int k, const ExactMode& mode) {
  if (k < 1 || k > g.node_count()) throw Error("budget k must satisfy 1 <= k <= n");
  auto cache = std::make_shared<CachedReach>(g, mode.limits);
  auto memo = std::make_shared<
      std::unordered_map<PartialRealisation, NodeId, PartialRealisationHash>>();
  AdaptivePolicy policy;
  policy.budget = k;
  policy.pick = [&g, cache, memo](const PartialRealisation& psi) {
    auto it = memo->find(psi);
    if (it != memo->end()) return it->second;
    EdgeStates states = detail::states_for_conditional(g, psi);
    SeedSet dom = psi.domain();
    double base = cache->expected_reach(states, dom);
    NodeId best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (dom.contains(v)) continue;
      double gain = cache->expected_reach(states, dom.with(v)) - base;
      if (gain > best_gain) {
        best_gain = gain;
        best = v;
      }
    }
    memo->emplace(psi, best);
    return best;
  };
  return policy;
}

// Monte Carlo adaptive greedy. Candidate gains at depth t are estimated on a
// batch derived from (seed, t): the unconditioned edge bits are frozen across
// candidates (common random numbers) and the observed seeds' out-edges are
// overridden to match psi.
inline AdaptivePolicy adaptive_greedy(const InfluenceGraph& g, int k, const McMode& mode) {
  if (k < 1 || k > g.node_count()) throw Error("budget k must satisfy 1 <= k <= n");
  if (mode.samples <= 0) throw Error("sample count must be positive");
  auto memo = std::make_shared<
      std::unordered_map<PartialRealisation, NodeId, PartialRealisationHash>>();
  AdaptivePolicy policy;
  policy.budget = k;
  policy.pick = [&g, mode, memo](const PartialRealisation& psi) {
    auto it = memo->find(psi);
    if (it != memo->end()) return it->second;
    psi.validate_against(g);
    SeedSet dom = psi.domain();
    std::vector<double> gain(g.node_count(), 0.0);
    std::uint64_t depth_seed = Rng::mix(mode.seed) ^ static_cast<std::uint64_t>(psi.size() + 1);
    for (int i = 0; i < mode.samples; ++i) {
      Rng rng = Rng::derive(depth_seed, static_cast<std::uint64_t>(i));
      LiveEdgeGraph live = sample_live_edge(g, rng);
      for (const auto& entry : psi.entries()) {
        for (int e : g.out_edges(entry.seed)) {
          bool seen = std::binary_search(entry.observed.begin(), entry.observed.end(),
                                         g.edge(e).target);
          live.set_present(e, seen);
        }
      }
      double base = realized_spread(live, dom);
      for (NodeId v = 0; v < g.node_count(); ++v) {
        if (dom.contains(v)) continue;
        gain[v] += realized_spread(live, dom.with(v)) - base;
      }
    }
    NodeId best = -1;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (dom.contains(v)) continue;
      if (gain[v] > best_gain) {
        best_gain = gain[v];
        best = v;
      }
    }
    memo->emplace(psi, best);
    return best;
  };
  return policy;
}

// E_rho[sigma(base + rho)] with rho drawn with probability x[v]/k; selecting
// a node already in base leaves the seed set unchanged.
inline double rand_t_value(const InfluenceGraph& g, const SeedSet& base,
                           const SelectionProbabilities& probs, int k,
                           const EnumLimits& limits = {}) {
  if (k < 1) throw Error("budget k must be positive");
  if (static_cast<int>(probs.x.size()) != g.node_count()) {
    throw Error("selection probabilities must have one entry per node");
  }
  CachedReach cache(g, limits);
  EdgeStates states(g.edge_count());
  double total = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (probs.x[v] == 0.0) continue;
    total += probs.x[v] / k * cache.expected_reach(states, base.with(v));
  }
  return total;
}

// Hybrid two-level value: the policy runs on the shadow draw's feedback; its
// picks plus `base` are then seeded together, every such seed keeping its
// shadow out-edges in addition to fresh base-draw edges. Outer enumeration
// walks shadow draws; the inner expectation over the base draw is a
// product-form expected reach (shadow-live seed-out edges pinned present).
inline double hybrid_two_level_value(const InfluenceGraph& g, const SeedSet& base,
                                     const AdaptivePolicy& policy, const EnumLimits& limits = {}) {
  CachedReach cache(g, limits);
  double total = 0.0;
  detail::for_each_live_graph(g, limits, [&](double prob, const LiveEdgeGraph& shadow) {
    PartialRealisation psi_hat = run_policy(policy, shadow);
    SeedSet seeds = psi_hat.domain().united(base);
    EdgeStates states(g.edge_count());
    for (NodeId u : seeds) {
      for (int e : g.out_edges(u)) {
        if (shadow.present(e)) states.set(e, EdgeState::Live);
      }
    }
    total += prob * cache.expected_reach(states, seeds);
  });
  return total;
}

// Conditional variant: observed seeds keep their pinned edges and no second
// chance; only the policy's fresh picks get their shadow edges.
inline double strong_hybrid_value(const InfluenceGraph& g, const PartialRealisation& psi,
                                  const AdaptivePolicy& policy, const EnumLimits& limits = {}) {
  CachedReach cache(g, limits);
  EdgeStates conditioned = detail::states_for_conditional(g, psi);
  SeedSet dom = psi.domain();
  double total = 0.0;
  detail::for_each_live_graph(g, limits, [&](double prob, const LiveEdgeGraph& shadow) {
    PartialRealisation psi_hat = run_policy(policy, shadow);
    SeedSet seeds = dom.united(psi_hat.domain());
    EdgeStates states = conditioned;
    for (NodeId u : seeds) {
      if (dom.contains(u)) continue;  // already observed: single, pinned chance
      for (int e : g.out_edges(u)) {
        if (shadow.present(e)) states.set(e, EdgeState::Live);
      }
    }
    total += prob * cache.expected_reach(states, seeds);
  });
  return total;
}

}  // namespace aim
