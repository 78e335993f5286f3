#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aim/diffusion.hpp"
#include "aim/enumeration.hpp"
#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/oracle.hpp"
#include "aim/parallel.hpp"
#include "aim/policies.hpp"
#include "aim/realisation.hpp"
#include "aim/report.hpp"
#include "aim/thresholds.hpp"

namespace aim {

struct CheckConfig {
  EnumLimits enum_limits{};
  OracleLimits oracle_limits{};
  // Per-instance cap on enumerated partial realisations; instances over the
  // cap are skipped and counted rather than failed.
  long long max_realisations = 20000;
  double tolerance = 1e-9;
  // Additionally exercise the hybrid inequality with every constant
  // (seed-set) policy, not just the optimal adaptive witness.
  bool include_constant_policies = false;
  int workers = 0;  // 0 = hardware default
};

namespace detail {

inline nlohmann::json realisation_to_json(const PartialRealisation& psi) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : psi.entries()) {
    entries.push_back({{"seed", e.seed}, {"observed", e.observed}});
  }
  return entries;
}

// Number of positive-probability partial realisations (over all domains):
// prod_v (1 + 2^{free out-edges of v}). Saturates at cap + 1.
inline long long count_realisations(const InfluenceGraph& g, long long cap) {
  long long total = 1;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    int free = 0;
    for (int e : g.out_edges(v)) {
      double p = g.edge(e).prob;
      if (p > 0.0 && p < 1.0) ++free;
    }
    if (free >= 40) return cap + 1;
    long long factor = 1 + (1LL << free);
    if (total > cap / factor + 1) return cap + 1;
    total *= factor;
    if (total > cap) return cap + 1;
  }
  return total;
}

// Every positive-probability partial realisation extending `base` whose new
// observations come from `nodes` (each node either unobserved or observed
// with one of its positive-probability feedback outcomes).
template <typename Fn>
void for_each_realisation_over(const InfluenceGraph& g, const std::vector<NodeId>& nodes,
                               const PartialRealisation& base, Fn&& fn) {
  auto rec = [&](auto&& self, const PartialRealisation& psi, std::size_t i) -> void {
    if (i == nodes.size()) {
      fn(psi);
      return;
    }
    self(self, psi, i + 1);
    for_each_observation(g, nodes[i], [&](double, std::vector<NodeId> observed, std::uint64_t) {
      PartialRealisation child = psi;
      child.add(nodes[i], std::move(observed));
      self(self, child, i + 1);
    });
  };
  rec(rec, base, 0);
}

template <typename Fn>
void for_each_realisation(const InfluenceGraph& g, Fn&& fn) {
  std::vector<NodeId> nodes(static_cast<std::size_t>(g.node_count()));
  std::iota(nodes.begin(), nodes.end(), 0);
  for_each_realisation_over(g, nodes, PartialRealisation{}, std::forward<Fn>(fn));
}

// Every realisation formed by keeping a subset of psi's entries.
template <typename Fn>
void for_each_subrealisation(const PartialRealisation& psi, Fn&& fn) {
  const auto& entries = psi.entries();
  int m = static_cast<int>(entries.size());
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << m); ++mask) {
    PartialRealisation sub;
    for (int i = 0; i < m; ++i) {
      if ((mask >> i) & 1) sub.add(entries[static_cast<std::size_t>(i)].seed,
                                   entries[static_cast<std::size_t>(i)].observed);
    }
    fn(sub);
  }
}

// Two-level marginal of v on top of `base`, conditioned on psi_hat. The
// observations in psi_hat pin the second-level copies of the out-edges of
// dom(psi_hat) \ base: observed live means the edge is present outright,
// observed dead leaves only the fresh first-level chance. Nodes in base keep
// a single free chance (their observations, if any, are irrelevant because
// base nodes get no second-level copy), and v fires both levels fresh.
inline double delta2_given(const InfluenceGraph& g, CachedReach& cache, const SeedSet& base,
                           NodeId v, const PartialRealisation& psi_hat) {
  if (base.contains(v) || psi_hat.contains(v)) return 0.0;
  SeedSet seeds = base.united(psi_hat.domain());
  EdgeStates states(g.edge_count());
  for (const auto& entry : psi_hat.entries()) {
    if (base.contains(entry.seed)) continue;
    for (int e : g.out_edges(entry.seed)) {
      if (std::binary_search(entry.observed.begin(), entry.observed.end(),
                             g.edge(e).target)) {
        states.set(e, EdgeState::Live);
      }
    }
  }
  double without_v = cache.expected_reach(states, seeds);
  for (int e : g.out_edges(v)) states.set(e, EdgeState::Boosted);
  double with_v = cache.expected_reach(states, seeds.with(v));
  return with_v - without_v;
}

// Expected reach of `seeds` when the first level is pinned by psi on its
// domain, every seed outside dom(psi) takes a second chance, and the
// policy's own first-level observations psi_hat (domain disjoint from
// dom(psi)) condition those seeds' edges.
inline double strong_reach(const InfluenceGraph& g, CachedReach& cache,
                           const PartialRealisation& psi, const PartialRealisation& psi_hat,
                           const SeedSet& seeds) {
  EdgeStates states = states_for_conditional(g, psi);
  for (NodeId u : seeds) {
    if (psi.contains(u)) continue;  // already observed: single chance, pinned
    if (const std::vector<NodeId>* obs = psi_hat.observation(u)) {
      for (int e : g.out_edges(u)) {
        // Observed live keeps the edge; observed dead leaves the fresh
        // second chance in place.
        if (std::binary_search(obs->begin(), obs->end(), g.edge(e).target)) {
          states.set(e, EdgeState::Live);
        }
      }
    } else {
      for (int e : g.out_edges(u)) {
        if (states.get(e) == EdgeState::Free) states.set(e, EdgeState::Boosted);
      }
    }
  }
  return cache.expected_reach(states, seeds);
}

// Conditional marginal of v in the strong model: base seeds are
// dom(psi) ∪ dom(psi_hat).
inline double strong_delta2_given(const InfluenceGraph& g, CachedReach& cache,
                                  const PartialRealisation& psi,
                                  const PartialRealisation& psi_hat, NodeId v) {
  if (psi.contains(v) || psi_hat.contains(v)) return 0.0;
  SeedSet seeds = psi.domain().united(psi_hat.domain());
  return strong_reach(g, cache, psi, psi_hat, seeds.with(v)) -
         strong_reach(g, cache, psi, psi_hat, seeds);
}

// All positive-probability realisations reachable by following `policy` for
// 0..depth picks (the empty realisation included).
inline std::vector<PartialRealisation> reachable_realisations(const InfluenceGraph& g,
                                                              const AdaptivePolicy& policy,
                                                              int depth) {
  std::vector<PartialRealisation> out;
  auto walk = [&](auto&& self, const PartialRealisation& psi, int d) -> void {
    out.push_back(psi);
    if (d == depth) return;
    NodeId v = policy.pick(psi);
    for_each_observation(g, v, [&](double, std::vector<NodeId> observed, std::uint64_t) {
      PartialRealisation child = psi;
      child.add(v, std::move(observed));
      self(self, child, d + 1);
    });
  };
  walk(walk, PartialRealisation{}, 0);
  return out;
}

inline void require_le(CheckReport& report, const InfluenceGraph& g, nlohmann::json params,
                       double lhs, double rhs, double tolerance) {
  report.record(lhs, rhs);
  if (lhs > rhs + tolerance) {
    report.violations.push_back({g.to_text(), std::move(params), lhs, rhs, lhs - rhs});
  }
}

template <typename PerInstance>
CheckReport run_over_family(const std::string& id, const std::vector<InfluenceGraph>& family,
                            const CheckConfig& cfg, PerInstance&& per) {
  std::vector<CheckReport> parts(family.size());
  int workers = cfg.workers > 0 ? cfg.workers : hardware_workers();
  parallel_for(
      static_cast<long long>(family.size()),
      [&](long long i) { parts[static_cast<std::size_t>(i)] = per(family[static_cast<std::size_t>(i)]); },
      workers);
  CheckReport merged;
  merged.check = id;
  for (const CheckReport& part : parts) merge_reports(merged, part);
  return merged;
}

// The exhaustive checks loop over every seed-set mask; beyond this many
// nodes that loop is pointless and the instance is skipped.
constexpr int kMaxExhaustiveNodes = 12;

}  // namespace detail

// sigma2(S) <= 2 sigma(S) for every seed set.
inline CheckReport check_two_level_upper(const std::vector<InfluenceGraph>& family,
                                         const CheckConfig& cfg = {}) {
  return detail::run_over_family(
      "two_level_upper", family, cfg, [&cfg](const InfluenceGraph& g) {
        CheckReport part;
        part.check = "two_level_upper";
        if (g.node_count() > detail::kMaxExhaustiveNodes) {
          part.skipped = 1;
          return part;
        }
        try {
          for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.node_count()); ++mask) {
            SeedSet seeds = SeedSet::from_mask(mask);
            double lhs = exact_two_level_spread(g, seeds, cfg.enum_limits);
            double rhs = 2.0 * exact_spread(g, seeds, cfg.enum_limits);
            detail::require_le(part, g, {{"seeds", seeds.members()}}, lhs, rhs, cfg.tolerance);
          }
          part.tested = 1;
        } catch (const EnumerationTooLarge&) {
          part.skipped = 1;
        }
        return part;
      });
}

// delta2_S(v) <= 2 delta_S(v) for every seed set and node.
inline CheckReport check_marginal_upper(const std::vector<InfluenceGraph>& family,
                                        const CheckConfig& cfg = {}) {
  return detail::run_over_family(
      "marginal_upper", family, cfg, [&cfg](const InfluenceGraph& g) {
        CheckReport part;
        part.check = "marginal_upper";
        if (g.node_count() > detail::kMaxExhaustiveNodes) {
          part.skipped = 1;
          return part;
        }
        try {
          for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.node_count()); ++mask) {
            SeedSet seeds = SeedSet::from_mask(mask);
            for (NodeId v = 0; v < g.node_count(); ++v) {
              double lhs = two_level_marginal(g, seeds, v, cfg.enum_limits);
              double rhs = 2.0 * marginal_gain(g, seeds, v, cfg.enum_limits);
              detail::require_le(part, g, {{"seeds", seeds.members()}, {"v", v}}, lhs, rhs,
                                 cfg.tolerance);
            }
          }
          part.tested = 1;
        } catch (const EnumerationTooLarge&) {
          part.skipped = 1;
        }
        return part;
      });
}

// Conditional two-level marginals never grow as observations accumulate:
// delta2_S(v | psi') <= delta2_S(v | psi) whenever psi is a subrealisation
// of psi', for every seed set S and node v.
inline CheckReport check_adaptive_submodularity(const std::vector<InfluenceGraph>& family,
                                                const CheckConfig& cfg = {}) {
  return detail::run_over_family(
      "adaptive_submodularity", family, cfg, [&cfg](const InfluenceGraph& g) {
        CheckReport part;
        part.check = "adaptive_submodularity";
        if (g.node_count() > detail::kMaxExhaustiveNodes ||
            detail::count_realisations(g, cfg.max_realisations) > cfg.max_realisations) {
          part.skipped = 1;
          return part;
        }
        try {
          CachedReach cache(g, cfg.enum_limits);
          detail::for_each_realisation(g, [&](const PartialRealisation& psi_prime) {
            detail::for_each_subrealisation(psi_prime, [&](const PartialRealisation& psi_hat) {
              for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.node_count()); ++mask) {
                SeedSet seeds = SeedSet::from_mask(mask);
                for (NodeId v = 0; v < g.node_count(); ++v) {
                  double lhs = detail::delta2_given(g, cache, seeds, v, psi_prime);
                  double rhs = detail::delta2_given(g, cache, seeds, v, psi_hat);
                  detail::require_le(part, g,
                                     {{"seeds", seeds.members()},
                                      {"v", v},
                                      {"psi_hat", detail::realisation_to_json(psi_hat)},
                                      {"psi_prime", detail::realisation_to_json(psi_prime)}},
                                     lhs, rhs, cfg.tolerance);
                }
              }
            });
          });
          part.tested = 1;
        } catch (const EnumerationTooLarge&) {
          part.skipped = 1;
        }
        return part;
      });
}

// Strong-model counterpart: delta2_psi(v | psi') <= delta2_psi(v | psi) for
// every prior realisation psi and nested pair psi ⊆ psi' of policy
// observations over the remaining nodes.
inline CheckReport check_strong_adaptive_submodularity(const std::vector<InfluenceGraph>& family,
                                                       const CheckConfig& cfg = {}) {
  return detail::run_over_family(
      "strong_adaptive_submodularity", family, cfg, [&cfg](const InfluenceGraph& g) {
        CheckReport part;
        part.check = "strong_adaptive_submodularity";
        long long count = detail::count_realisations(g, cfg.max_realisations);
        // The prior and the policy realisation are enumerated jointly, so the
        // budget for the pair is quadratic in the single-realisation count.
        if (g.node_count() > detail::kMaxExhaustiveNodes ||
            count > cfg.max_realisations || count * count > 50 * cfg.max_realisations) {
          part.skipped = 1;
          return part;
        }
        try {
          CachedReach cache(g, cfg.enum_limits);
          detail::for_each_realisation(g, [&](const PartialRealisation& psi) {
            std::vector<NodeId> rest;
            for (NodeId v = 0; v < g.node_count(); ++v) {
              if (!psi.contains(v)) rest.push_back(v);
            }
            detail::for_each_realisation_over(
                g, rest, PartialRealisation{}, [&](const PartialRealisation& psi_prime) {
                  detail::for_each_subrealisation(
                      psi_prime, [&](const PartialRealisation& psi_hat) {
                        for (NodeId v = 0; v < g.node_count(); ++v) {
                          double lhs = detail::strong_delta2_given(g, cache, psi, psi_prime, v);
                          double rhs = detail::strong_delta2_given(g, cache, psi, psi_hat, v);
                          detail::require_le(
                              part, g,
                              {{"psi", detail::realisation_to_json(psi)},
                               {"v", v},
                               {"psi_hat", detail::realisation_to_json(psi_hat)},
                               {"psi_prime", detail::realisation_to_json(psi_prime)}},
                              lhs, rhs, cfg.tolerance);
                        }
                      });
                });
          });
          part.tested = 1;
        } catch (const EnumerationTooLarge&) {
          part.skipped = 1;
        }
        return part;
      });
}

// k * (E_rho[sigma({rho} ∪ S)] - sigma(S)) >= sum_{v ∉ S} x_v delta_S(v),
// with x the optimal adaptive policy's selection probabilities. The
// derivation gives equality when the sum skips v ∈ S; the report notes
// whether equality held everywhere without assuming it.
inline CheckReport check_rand_lower(const std::vector<InfluenceGraph>& family, int k,
                                    const CheckConfig& cfg = {}) {
  return detail::run_over_family(
      "rand_lower", family, cfg, [&cfg, k](const InfluenceGraph& g) {
        CheckReport part;
        part.check = "rand_lower";
        if (k > g.node_count() || g.node_count() > detail::kMaxExhaustiveNodes) {
          part.skipped = 1;
          return part;
        }
        try {
          AdaptiveOracleResult opt = opt_adaptive(g, k, cfg.oracle_limits);
          AdaptivePolicy pi = tree_policy(g, opt.tree);
          SelectionProbabilities x = selection_probabilities(g, pi, cfg.enum_limits);
          bool all_equal = true;
          for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.node_count()); ++mask) {
            SeedSet seeds = SeedSet::from_mask(mask);
            double sigma = exact_spread(g, seeds, cfg.enum_limits);
            double randomized = rand_t_value(g, seeds, x, k, cfg.enum_limits);
            double lhs = 0.0;
            for (NodeId v = 0; v < g.node_count(); ++v) {
              if (!seeds.contains(v) && x.x[static_cast<std::size_t>(v)] > 0.0) {
                lhs += x.x[static_cast<std::size_t>(v)] *
                       marginal_gain(g, seeds, v, cfg.enum_limits);
              }
            }
            double rhs = k * (randomized - sigma);
            detail::require_le(part, g, {{"seeds", seeds.members()}, {"k", k}}, lhs, rhs,
                               cfg.tolerance);
            if (std::abs(rhs - lhs) > cfg.tolerance) all_equal = false;
          }
          part.notes["all_equality_held"] = all_equal;
          part.tested = 1;
        } catch (const EnumerationTooLarge&) {
          part.skipped = 1;
        }
        return part;
      });
}

namespace detail {

// Hybrid inequality for one policy: E[sigma2(dom(psi_hat) ∪ S)] <=
// sigma2(S) + sum_{v ∉ S} x_v delta2_S(v | empty) for every seed set S. The
// per-node term is the conditional two-level marginal at the empty
// observation, which measures v's doubled chances against the plain spread
// of S.
inline void hybrid_weak_for_policy(CheckReport& part, const InfluenceGraph& g,
                                   CachedReach& cache, const AdaptivePolicy& pi,
                                   const SelectionProbabilities& x, const std::string& label,
                                   const CheckConfig& cfg) {
  const PartialRealisation empty;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.node_count()); ++mask) {
    SeedSet seeds = SeedSet::from_mask(mask);
    double lhs = hybrid_two_level_value(g, seeds, pi, cfg.enum_limits);
    double rhs = exact_two_level_spread(g, seeds, cfg.enum_limits);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (!seeds.contains(v) && x.x[static_cast<std::size_t>(v)] > 0.0) {
        rhs += x.x[static_cast<std::size_t>(v)] * delta2_given(g, cache, seeds, v, empty);
      }
    }
    require_le(part, g, {{"seeds", seeds.members()}, {"policy", label}}, lhs, rhs,
               cfg.tolerance);
  }
}

}  // namespace detail

// Weak mode: hybrid two-level value vs sigma2(S) + sum x_v delta2_S(v) over
// every S. Strong mode: the conditional variant over every realisation
// reachable under exact adaptive-greedy prefixes.
inline CheckReport check_hybrid_bound(const std::vector<InfluenceGraph>& family, int k,
                                      bool strong, const CheckConfig& cfg = {}) {
  std::string id = strong ? "hybrid_bound_strong" : "hybrid_bound_weak";
  return detail::run_over_family(id, family, cfg, [&cfg, k, strong, id](const InfluenceGraph& g) {
    CheckReport part;
    part.check = id;
    if (k > g.node_count() || g.node_count() > detail::kMaxExhaustiveNodes) {
      part.skipped = 1;
      return part;
    }
    try {
      AdaptiveOracleResult opt = opt_adaptive(g, k, cfg.oracle_limits);
      AdaptivePolicy pi = tree_policy(g, opt.tree);
      SelectionProbabilities x = selection_probabilities(g, pi, cfg.enum_limits);
      CachedReach cache(g, cfg.enum_limits);
      if (!strong) {
        detail::hybrid_weak_for_policy(part, g, cache, pi, x, "optimal", cfg);
        if (cfg.include_constant_policies) {
          std::vector<NodeId> comb(static_cast<std::size_t>(k));
          std::iota(comb.begin(), comb.end(), 0);
          for (;;) {
            AdaptivePolicy fixed = constant_policy(comb);
            SelectionProbabilities ones = selection_probabilities(g, fixed, cfg.enum_limits);
            detail::hybrid_weak_for_policy(part, g, cache, fixed, ones, "constant", cfg);
            int i = k - 1;
            while (i >= 0 && comb[i] == g.node_count() - k + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
          }
        }
      } else {
        AdaptivePolicy greedy = adaptive_greedy(g, k, ExactMode{cfg.enum_limits});
        for (const PartialRealisation& psi :
             detail::reachable_realisations(g, greedy, k)) {
          double lhs = strong_hybrid_value(g, psi, pi, cfg.enum_limits);
          double base = conditional_spread(g, psi, SeedSet{}, cfg.enum_limits);
          double rhs = base;
          for (NodeId v = 0; v < g.node_count(); ++v) {
            if (psi.contains(v) || x.x[static_cast<std::size_t>(v)] == 0.0) continue;
            double with_v =
                strong_two_level_conditional_spread(g, psi, SeedSet{}.with(v), cfg.enum_limits);
            rhs += x.x[static_cast<std::size_t>(v)] * (with_v - base);
          }
          detail::require_le(part, g, {{"psi", detail::realisation_to_json(psi)}, {"k", k}},
                             lhs, rhs, cfg.tolerance);
        }
      }
      part.tested = 1;
    } catch (const EnumerationTooLarge&) {
      part.skipped = 1;
    }
    return part;
  });
}

// The optimal adaptive value never exceeds the hybrid value, for every seed
// set (weak) or every greedy-reachable realisation (strong).
inline CheckReport check_opt_bound(const std::vector<InfluenceGraph>& family, int k, bool strong,
                                   const CheckConfig& cfg = {}) {
  std::string id = strong ? "opt_bound_strong" : "opt_bound_weak";
  return detail::run_over_family(id, family, cfg, [&cfg, k, strong, id](const InfluenceGraph& g) {
    CheckReport part;
    part.check = id;
    if (k > g.node_count() || g.node_count() > detail::kMaxExhaustiveNodes) {
      part.skipped = 1;
      return part;
    }
    try {
      AdaptiveOracleResult opt = opt_adaptive(g, k, cfg.oracle_limits);
      AdaptivePolicy pi = tree_policy(g, opt.tree);
      if (!strong) {
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << g.node_count()); ++mask) {
          SeedSet seeds = SeedSet::from_mask(mask);
          double rhs = hybrid_two_level_value(g, seeds, pi, cfg.enum_limits);
          detail::require_le(part, g, {{"seeds", seeds.members()}, {"k", k}}, opt.value, rhs,
                             cfg.tolerance);
        }
      } else {
        AdaptivePolicy greedy = adaptive_greedy(g, k, ExactMode{cfg.enum_limits});
        for (const PartialRealisation& psi :
             detail::reachable_realisations(g, greedy, k)) {
          double rhs = strong_hybrid_value(g, psi, pi, cfg.enum_limits);
          detail::require_le(part, g, {{"psi", detail::realisation_to_json(psi)}, {"k", k}},
                             opt.value, rhs, cfg.tolerance);
        }
      }
      part.tested = 1;
    } catch (const EnumerationTooLarge&) {
      part.skipped = 1;
    }
    return part;
  });
}

// Both greedy guarantees against the optimal adaptive value, recording the
// worst observed ratios.
inline CheckReport check_theorem_ratios(const std::vector<InfluenceGraph>& family, int k,
                                        const CheckConfig& cfg = {}) {
  return detail::run_over_family(
      "theorem_ratios", family, cfg, [&cfg, k](const InfluenceGraph& g) {
        CheckReport part;
        part.check = "theorem_ratios";
        if (k > g.node_count()) {
          part.skipped = 1;
          return part;
        }
        try {
          double opt_a = opt_adaptive(g, k, cfg.oracle_limits).value;
          ExactSpreadEvaluator evaluator(g, cfg.enum_limits);
          double greedy_n = nonadaptive_greedy(g, k, evaluator).values.back();
          AdaptivePolicy greedy_a = adaptive_greedy(g, k, ExactMode{cfg.enum_limits});
          double value_a = evaluate_policy(g, greedy_a, ExactMode{cfg.enum_limits});
          detail::require_le(part, g, {{"k", k}, {"algorithm", "nonadaptive_greedy"}},
                             nonadaptive_greedy_factor(k) * opt_a, greedy_n, cfg.tolerance);
          detail::require_le(part, g, {{"k", k}, {"algorithm", "adaptive_greedy"}},
                             adaptive_greedy_factor(k) * opt_a, value_a, cfg.tolerance);
          part.notes["min_nonadaptive_ratio"] = greedy_n / opt_a;
          part.notes["min_adaptive_ratio"] = value_a / opt_a;
          part.tested = 1;
        } catch (const EnumerationTooLarge&) {
          part.skipped = 1;
        }
        return part;
      });
}

struct GapSearchResult {
  int best_index = -1;        // position in the family, -1 when nothing ran
  std::string best_graph;     // edge-list text of the best instance
  GapReport best{};
  CheckReport ceiling;        // per-instance gap vs the budget-k ceiling
};

// Computes the adaptivity gap of every oracle-feasible instance, keeps the
// largest, and checks each against the budget-k ceiling. A positive target
// stops the scan at the first gap >= target.
inline GapSearchResult search_gap_witness(const std::vector<InfluenceGraph>& family, int k,
                                          double target = 0.0, const CheckConfig& cfg = {}) {
  GapSearchResult result;
  result.ceiling.check = "gap_ceiling";
  std::vector<std::optional<GapReport>> gaps(family.size());
  auto run_one = [&](std::size_t i) {
    const InfluenceGraph& g = family[i];
    if (k > g.node_count()) return;
    try {
      gaps[i] = adaptivity_gap(g, k, cfg.oracle_limits);
    } catch (const EnumerationTooLarge&) {
    }
  };
  if (target > 0.0) {
    for (std::size_t i = 0; i < family.size(); ++i) {
      run_one(i);
      if (gaps[i] && gaps[i]->gap >= target) break;
    }
  } else {
    int workers = cfg.workers > 0 ? cfg.workers : hardware_workers();
    parallel_for(
        static_cast<long long>(family.size()),
        [&](long long i) { run_one(static_cast<std::size_t>(i)); }, workers);
  }
  double ceiling = gap_ceiling(k);
  double max_gap = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!gaps[i]) {
      ++result.ceiling.skipped;
      continue;
    }
    ++result.ceiling.tested;
    const GapReport& report = *gaps[i];
    detail::require_le(result.ceiling, family[i], {{"k", k}, {"opt_n", report.opt_n},
                                                   {"opt_a", report.opt_a}},
                       report.gap, ceiling, cfg.tolerance);
    max_gap = std::max(max_gap, report.gap);
    if (result.best_index < 0 || report.gap > result.best.gap) {
      result.best_index = static_cast<int>(i);
      result.best = report;
      result.best_graph = family[i].to_text();
    }
    if (target > 0.0 && report.gap >= target) break;
  }
  result.ceiling.notes["max_gap"] = max_gap;
  return result;
}

inline const std::vector<std::string>& all_check_ids() {
  static const std::vector<std::string> ids = {
      "two_level_upper",   "marginal_upper",      "adaptive_submodularity",
      "strong_adaptive_submodularity", "rand_lower", "hybrid_bound_weak",
      "hybrid_bound_strong", "opt_bound_weak",    "opt_bound_strong",
      "theorem_ratios"};
  return ids;
}

inline CheckReport run_check(const std::string& id, const std::vector<InfluenceGraph>& family,
                             int k, const CheckConfig& cfg = {}) {
  if (id == "two_level_upper") return check_two_level_upper(family, cfg);
  if (id == "marginal_upper") return check_marginal_upper(family, cfg);
  if (id == "adaptive_submodularity") return check_adaptive_submodularity(family, cfg);
  if (id == "strong_adaptive_submodularity") {
    return check_strong_adaptive_submodularity(family, cfg);
  }
  if (id == "rand_lower") return check_rand_lower(family, k, cfg);
  if (id == "hybrid_bound_weak") return check_hybrid_bound(family, k, false, cfg);
  if (id == "hybrid_bound_strong") return check_hybrid_bound(family, k, true, cfg);
  if (id == "opt_bound_weak") return check_opt_bound(family, k, false, cfg);
  if (id == "opt_bound_strong") return check_opt_bound(family, k, true, cfg);
  if (id == "theorem_ratios") return check_theorem_ratios(family, k, cfg);
  throw Error("unknown check id: " + id);
}

}  // namespace aim
