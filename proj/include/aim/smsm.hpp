#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aim/errors.hpp"
#include "aim/parallel.hpp"
#include "aim/policies.hpp"
#include "aim/report.hpp"
#include "aim/rng.hpp"
#include "aim/seed_set.hpp"
#include "aim/thresholds.hpp"

namespace aim {

// One realizable state of an item.
struct StateOutcome {
  double value = 0.0;
  double prob = 0.0;
};

using ItemDistribution = std::vector<StateOutcome>;

// Monotone lattice-submodular objectives over non-negative state vectors.
struct SmsmObjective {
  enum class Kind { Modular, CappedSum, Coverage };

  Kind kind = Kind::Modular;
  std::vector<double> weights;                 // modular / capped_sum
  double cap = 0.0;                            // capped_sum
  std::vector<std::vector<double>> coverage;   // coverage[j][i]: element j, item i
  std::vector<double> caps;                    // per-element caps

  double value(const std::vector<double>& x) const {
    switch (kind) {
      case Kind::Modular: {
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) total += weights[i] * x[i];
        return total;
      }
      case Kind::CappedSum: {
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) total += weights[i] * x[i];
        return std::min(cap, total);
      }
      case Kind::Coverage: {
        double total = 0.0;
        for (std::size_t j = 0; j < coverage.size(); ++j) {
          double covered = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) {
            covered = std::max(covered, coverage[j][i] * x[i]);
          }
          total += std::min(caps[j], covered);
        }
        return total;
      }
    }
    return 0.0;
  }
};

struct SmsmInstance {
  int n = 0;
  int k = 0;
  std::vector<ItemDistribution> items;
  SmsmObjective objective;
};

// State vector together with the set of items actually selected; values of
// unselected items are pinned to zero.
struct PartialState {
  std::vector<double> values;
  SeedSet support;
};

inline void validate_instance(const SmsmInstance& inst) {
  if (inst.n < 1) throw Error("instance needs at least one item");
  if (inst.k < 1 || inst.k > inst.n) throw Error("budget k must satisfy 1 <= k <= n");
  if (static_cast<int>(inst.items.size()) != inst.n) {
    throw Error("instance needs one distribution per item");
  }
  for (const ItemDistribution& dist : inst.items) {
    if (dist.empty()) throw Error("item distribution must have at least one outcome");
    double total = 0.0;
    for (const StateOutcome& o : dist) {
      if (o.value < 0.0) throw Error("state values must be non-negative");
      if (o.prob < 0.0) throw Error("outcome probabilities must be non-negative");
      total += o.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw Error("outcome probabilities must sum to 1");
    }
  }
  auto check_size = [&](const std::vector<double>& w, const char* what) {
    if (static_cast<int>(w.size()) != inst.n) {
      throw Error(std::string(what) + " must have one entry per item");
    }
  };
  switch (inst.objective.kind) {
    case SmsmObjective::Kind::Modular:
      check_size(inst.objective.weights, "modular weights");
      break;
    case SmsmObjective::Kind::CappedSum:
      check_size(inst.objective.weights, "capped-sum weights");
      if (inst.objective.cap < 0.0) throw Error("cap must be non-negative");
      break;
    case SmsmObjective::Kind::Coverage:
      if (inst.objective.coverage.size() != inst.objective.caps.size()) {
        throw Error("coverage needs one cap per element");
      }
      for (const auto& row : inst.objective.coverage) check_size(row, "coverage rows");
      for (double c : inst.objective.caps) {
        if (c < 0.0) throw Error("caps must be non-negative");
      }
      break;
  }
  for (double w : inst.objective.weights) {
    if (w < 0.0) throw Error("weights must be non-negative");
  }
}

namespace detail {

constexpr long long kSmsmStateCap = 2'000'000;

// Mixed-radix state codes: digit i is 0 when item i is unselected, 1 + j for
// outcome j. weights[i] is the positional multiplier; returns the total code
// count (saturating), which bounds the adaptive DP state space.
inline long long smsm_radix_weights(const SmsmInstance& inst, std::vector<long long>& weights) {
  weights.assign(static_cast<std::size_t>(inst.n), 0);
  long long total = 1;
  for (int i = 0; i < inst.n; ++i) {
    weights[static_cast<std::size_t>(i)] = total;
    long long radix = static_cast<long long>(inst.items[static_cast<std::size_t>(i)].size()) + 1;
    if (total > (kSmsmStateCap * 4) / radix) return kSmsmStateCap * 4;
    total *= radix;
  }
  return total;
}

// Enumerates the joint states of the items in `over`, extending `values`
// in place; fn(prob) is called with the assignment applied.
template <typename Fn>
void for_each_joint_state(const SmsmInstance& inst, const std::vector<NodeId>& over,
                          std::vector<double>& values, Fn&& fn) {
  auto rec = [&](auto&& self, std::size_t idx, double prob) -> void {
    if (idx == over.size()) {
      fn(prob);
      return;
    }
    NodeId item = over[idx];
    for (const StateOutcome& o : inst.items[static_cast<std::size_t>(item)]) {
      values[static_cast<std::size_t>(item)] = o.value;
      self(self, idx + 1, prob * o.prob);
    }
    values[static_cast<std::size_t>(item)] = 0.0;
  };
  rec(rec, 0, 1.0);
}

inline long long joint_state_count(const SmsmInstance& inst, const std::vector<NodeId>& over,
                                   long long cap) {
  long long total = 1;
  for (NodeId item : over) {
    long long size = static_cast<long long>(inst.items[static_cast<std::size_t>(item)].size());
    if (total > cap / size + 1) return cap + 1;
    total *= size;
  }
  return total;
}

}  // namespace detail

// Exact E[f(theta(S))] by enumerating the joint states of S.
inline double smsm_expected_value(const SmsmInstance& inst, const SeedSet& S,
                                  long long max_states = detail::kSmsmStateCap) {
  std::vector<NodeId> over = S.members();
  long long states = detail::joint_state_count(inst, over, max_states);
  if (states > max_states) throw EnumerationTooLarge("smsm joint states", states, max_states);
  std::vector<double> values(static_cast<std::size_t>(inst.n), 0.0);
  double total = 0.0;
  detail::for_each_joint_state(inst, over, values,
                               [&](double prob) { total += prob * inst.objective.value(values); });
  return total;
}

// Expected increment of item i on top of the partial state xi.
inline double smsm_marginal(const SmsmInstance& inst, const PartialState& xi, NodeId i) {
  if (xi.support.contains(i)) {
    throw ItemAlreadySelected("item " + std::to_string(i) + " is already selected");
  }
  double base = inst.objective.value(xi.values);
  double total = 0.0;
  std::vector<double> bumped = xi.values;
  for (const StateOutcome& o : inst.items[static_cast<std::size_t>(i)]) {
    bumped[static_cast<std::size_t>(i)] = std::max(xi.values[static_cast<std::size_t>(i)], o.value);
    total += o.prob * (inst.objective.value(bumped) - base);
  }
  return total;
}

// Non-adaptive greedy on expected values; ties go to the smallest item id.
inline GreedyTrace smsm_greedy(const SmsmInstance& inst,
                               long long max_states = detail::kSmsmStateCap) {
  validate_instance(inst);
  GreedyTrace trace;
  SeedSet chosen;
  for (int step = 0; step < inst.k; ++step) {
    NodeId best = -1;
    double best_value = -std::numeric_limits<double>::infinity();
    for (NodeId i = 0; i < inst.n; ++i) {
      if (chosen.contains(i)) continue;
      double value = smsm_expected_value(inst, chosen.with(i), max_states);
      if (value > best_value) {
        best_value = value;
        best = i;
      }
    }
    chosen.insert(best);
    trace.seeds.push_back(best);
    trace.values.push_back(best_value);
  }
  return trace;
}

// Adaptive decision tree over item-state outcomes: node i picks
// nodes[i].pick, child slot j follows outcome j of that item's
// distribution; -1 ends the path after exactly k picks.
struct SmsmDecisionNode {
  NodeId pick = -1;
  std::vector<int> children;
};

struct SmsmDecisionTree {
  int k = 0;
  int root = -1;
  std::vector<SmsmDecisionNode> nodes;
};

struct SmsmOracleResult {
  double value = 0.0;
  SmsmDecisionTree tree;
};

inline void validate_smsm_tree(const SmsmInstance& inst, const SmsmDecisionTree& tree) {
  if (tree.k < 1 || tree.k > inst.n) throw MalformedTree("tree budget outside [1, n]");
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
    const SmsmDecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
    if (node.pick < 0 || node.pick >= inst.n) throw MalformedTree("pick is not a valid item id");
    if ((path >> node.pick) & 1) throw MalformedTree("item repeated along a path");
    if (node.children.size() != inst.items[static_cast<std::size_t>(node.pick)].size()) {
      throw MalformedTree("branch count does not match the item's outcome count");
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

// Optimal adaptive value by backward induction over (selected set, realized
// outcomes), with the argmax decision tree. Ties go to the smallest item id.
inline SmsmOracleResult smsm_opt_adaptive(const SmsmInstance& inst,
                                          long long max_states = detail::kSmsmStateCap) {
  validate_instance(inst);
  std::vector<long long> radix;
  long long states = detail::smsm_radix_weights(inst, radix);
  if (states > max_states) throw EnumerationTooLarge("smsm adaptive states", states, max_states);

  std::unordered_map<long long, std::pair<double, NodeId>> memo;
  std::vector<double> values(static_cast<std::size_t>(inst.n), 0.0);
  // Decodes `code` into the shared `values` buffer (and restores on exit) so
  // terminal evaluations need no allocation.
  auto terminal_value = [&](long long code) {
    long long rest = code;
    for (int i = 0; i < inst.n; ++i) {
      long long digit = rest % (static_cast<long long>(inst.items[static_cast<std::size_t>(i)].size()) + 1);
      rest /= static_cast<long long>(inst.items[static_cast<std::size_t>(i)].size()) + 1;
      values[static_cast<std::size_t>(i)] =
          digit == 0 ? 0.0 : inst.items[static_cast<std::size_t>(i)][static_cast<std::size_t>(digit - 1)].value;
    }
    double v = inst.objective.value(values);
    std::fill(values.begin(), values.end(), 0.0);
    return v;
  };
  auto selected = [&](long long code, NodeId i) {
    long long digit = (code / radix[static_cast<std::size_t>(i)]) %
                      (static_cast<long long>(inst.items[static_cast<std::size_t>(i)].size()) + 1);
    return digit != 0;
  };
  auto solve = [&](auto&& self, long long code, int depth) -> std::pair<double, NodeId> {
    if (auto it = memo.find(code); it != memo.end()) return it->second;
    std::pair<double, NodeId> entry{0.0, -1};
    if (depth == inst.k) {
      entry.first = terminal_value(code);
    } else {
      entry.first = -std::numeric_limits<double>::infinity();
      for (NodeId i = 0; i < inst.n; ++i) {
        if (selected(code, i)) continue;
        const ItemDistribution& dist = inst.items[static_cast<std::size_t>(i)];
        double expected = 0.0;
        for (std::size_t o = 0; o < dist.size(); ++o) {
          long long child = code + radix[static_cast<std::size_t>(i)] * static_cast<long long>(o + 1);
          expected += dist[o].prob * self(self, child, depth + 1).first;
        }
        if (expected > entry.first) {
          entry.first = expected;
          entry.second = i;
        }
      }
    }
    memo.emplace(code, entry);
    return entry;
  };
  std::pair<double, NodeId> root = solve(solve, 0, 0);

  SmsmOracleResult result;
  result.value = root.first;
  result.tree.k = inst.k;
  auto build = [&](auto&& self, long long code, int depth) -> int {
    std::pair<double, NodeId> entry = solve(solve, code, depth);
    int index = static_cast<int>(result.tree.nodes.size());
    result.tree.nodes.push_back({entry.second, {}});
    const ItemDistribution& dist = inst.items[static_cast<std::size_t>(entry.second)];
    std::vector<int> children(dist.size(), -1);
    if (depth + 1 < inst.k) {
      for (std::size_t o = 0; o < dist.size(); ++o) {
        long long child = code + radix[static_cast<std::size_t>(entry.second)] * static_cast<long long>(o + 1);
        children[o] = self(self, child, depth + 1);
      }
    }
    result.tree.nodes[static_cast<std::size_t>(index)].children = std::move(children);
    return index;
  };
  result.tree.root = build(build, 0, 0);
  return result;
}

// Expected value of the tree policy, summed over outcome branches;
// cross-validates the induction value.
inline double smsm_evaluate_tree(const SmsmInstance& inst, const SmsmDecisionTree& tree) {
  validate_smsm_tree(inst, tree);
  std::vector<double> values(static_cast<std::size_t>(inst.n), 0.0);
  auto walk = [&](auto&& self, int index, double prob) -> double {
    const SmsmDecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
    const ItemDistribution& dist = inst.items[static_cast<std::size_t>(node.pick)];
    double total = 0.0;
    for (std::size_t o = 0; o < dist.size(); ++o) {
      values[static_cast<std::size_t>(node.pick)] = dist[o].value;
      int child = node.children[o];
      if (child == -1) {
        total += prob * dist[o].prob * inst.objective.value(values);
      } else {
        total += self(self, child, prob * dist[o].prob);
      }
    }
    values[static_cast<std::size_t>(node.pick)] = 0.0;
    return total;
  };
  return walk(walk, tree.root, 1.0);
}

// x[i] = probability that the tree policy selects item i.
inline SelectionProbabilities smsm_selection_probabilities(const SmsmInstance& inst,
                                                           const SmsmDecisionTree& tree) {
  validate_smsm_tree(inst, tree);
  SelectionProbabilities result;
  result.x.assign(static_cast<std::size_t>(inst.n), 0.0);
  auto walk = [&](auto&& self, int index, double prob) -> void {
    const SmsmDecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
    result.x[static_cast<std::size_t>(node.pick)] += prob;
    const ItemDistribution& dist = inst.items[static_cast<std::size_t>(node.pick)];
    for (std::size_t o = 0; o < dist.size(); ++o) {
      if (node.children[o] != -1) self(self, node.children[o], prob * dist[o].prob);
    }
  };
  walk(walk, tree.root, 1.0);
  return result;
}

namespace detail {

// E_{theta,theta_hat}[f(theta(S) ∨ theta_hat(U ∪ S))] where U is the item
// set the tree policy selects while observing theta_hat. Walks the policy
// over theta_hat outcomes, extends theta_hat over S \ U, then takes the
// inner expectation over theta(S).
inline double smsm_hybrid_value(const SmsmInstance& inst, const SeedSet& S,
                                const SmsmDecisionTree& tree) {
  std::vector<double> hat(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<double> own(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<double> merged(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<NodeId> s_members = S.members();
  double total = 0.0;

  auto inner = [&](double path_prob, const SeedSet& picked) {
    // theta_hat outside the policy's picks matters only on S.
    std::vector<NodeId> rest;
    for (NodeId i : s_members) {
      if (!picked.contains(i)) rest.push_back(i);
    }
    for_each_joint_state(inst, rest, hat, [&](double hat_prob) {
      for_each_joint_state(inst, s_members, own, [&](double own_prob) {
        for (int i = 0; i < inst.n; ++i) {
          merged[static_cast<std::size_t>(i)] =
              std::max(own[static_cast<std::size_t>(i)], hat[static_cast<std::size_t>(i)]);
        }
        total += path_prob * hat_prob * own_prob * inst.objective.value(merged);
      });
    });
  };

  auto walk = [&](auto&& self, int index, double prob, const SeedSet& picked) -> void {
    const SmsmDecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
    const ItemDistribution& dist = inst.items[static_cast<std::size_t>(node.pick)];
    for (std::size_t o = 0; o < dist.size(); ++o) {
      hat[static_cast<std::size_t>(node.pick)] = dist[o].value;
      int child = node.children[o];
      if (child == -1) {
        inner(prob * dist[o].prob, picked.with(node.pick));
      } else {
        self(self, child, prob * dist[o].prob, picked.with(node.pick));
      }
    }
    hat[static_cast<std::size_t>(node.pick)] = 0.0;
  };
  walk(walk, tree.root, 1.0, SeedSet{});
  return total;
}

// E_{theta,theta_hat}[f(theta(S) ∨ theta_hat(S))]: two independent copies
// of the states on S, merged componentwise.
inline double smsm_doubled_value(const SmsmInstance& inst, const SeedSet& S) {
  std::vector<double> own(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<double> hat(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<double> merged(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<NodeId> members = S.members();
  double total = 0.0;
  for_each_joint_state(inst, members, own, [&](double p_own) {
    for_each_joint_state(inst, members, hat, [&](double p_hat) {
      for (int i = 0; i < inst.n; ++i) {
        merged[static_cast<std::size_t>(i)] =
            std::max(own[static_cast<std::size_t>(i)], hat[static_cast<std::size_t>(i)]);
      }
      total += p_own * p_hat * inst.objective.value(merged);
    });
  });
  return total;
}

// E_theta[Delta(i | theta(S))].
inline double smsm_expected_marginal(const SmsmInstance& inst, const SeedSet& S, NodeId i) {
  std::vector<double> values(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<NodeId> members = S.members();
  double total = 0.0;
  for_each_joint_state(inst, members, values, [&](double prob) {
    PartialState xi{values, S};
    total += prob * smsm_marginal(inst, xi, i);
  });
  return total;
}

}  // namespace detail

// Monotonicity and lattice submodularity of the objective, checked on every
// pair of lattice points built from the instance's own state values.
inline void verify_objective(const SmsmInstance& inst, double tolerance = 1e-12) {
  std::vector<std::vector<double>> grid(static_cast<std::size_t>(inst.n));
  for (int i = 0; i < inst.n; ++i) {
    std::vector<double>& axis = grid[static_cast<std::size_t>(i)];
    axis.push_back(0.0);
    for (const StateOutcome& o : inst.items[static_cast<std::size_t>(i)]) axis.push_back(o.value);
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  }
  std::vector<std::vector<double>> points;
  std::vector<double> current(static_cast<std::size_t>(inst.n), 0.0);
  auto emit = [&](auto&& self, int i) -> void {
    if (i == inst.n) {
      points.push_back(current);
      return;
    }
    for (double v : grid[static_cast<std::size_t>(i)]) {
      current[static_cast<std::size_t>(i)] = v;
      self(self, i + 1);
    }
  };
  emit(emit, 0);
  long long pairs = static_cast<long long>(points.size()) * static_cast<long long>(points.size());
  if (pairs > 10'000'000) {
    throw EnumerationTooLarge("objective lattice pairs", pairs, 10'000'000);
  }
  std::vector<double> meet(static_cast<std::size_t>(inst.n), 0.0);
  std::vector<double> join(static_cast<std::size_t>(inst.n), 0.0);
  for (const auto& x : points) {
    for (const auto& y : points) {
      for (int i = 0; i < inst.n; ++i) {
        meet[static_cast<std::size_t>(i)] =
            std::min(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
        join[static_cast<std::size_t>(i)] =
            std::max(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
      }
      double fx = inst.objective.value(x);
      double fy = inst.objective.value(y);
      double fj = inst.objective.value(join);
      double fm = inst.objective.value(meet);
      if (fj + fm > fx + fy + tolerance) throw Error("objective is not lattice submodular");
      if (fx > fj + tolerance) throw Error("objective is not monotone");
    }
  }
}

// Verifies the randomized-policy identity, both hybrid inequalities, and the
// greedy approximation ratio on one instance. The identity is checked in its
// budget-scaled form: k * (E[f(theta(S ∪ {rho}))] - E[f(theta(S))]) equals
// the x-weighted sum of expected marginals outside S.
inline CheckReport smsm_check_bounds(const SmsmInstance& inst, double tolerance = 1e-9,
                                       long long max_states = detail::kSmsmStateCap) {
  validate_instance(inst);
  verify_objective(inst);
  if (inst.k < 2) throw Error("ratio checks require k >= 2");
  CheckReport report;
  report.check = "smsm_bounds";
  std::string payload = nlohmann::json({{"n", inst.n}, {"k", inst.k}}).dump();

  GreedyTrace trace = smsm_greedy(inst, max_states);
  SmsmOracleResult opt = smsm_opt_adaptive(inst, max_states);
  SelectionProbabilities x = smsm_selection_probabilities(inst, opt.tree);

  auto record = [&](nlohmann::json params, double lhs, double rhs) {
    report.record(lhs, rhs);
    if (lhs > rhs + tolerance) {
      report.violations.push_back({payload, std::move(params), lhs, rhs, lhs - rhs});
    }
  };

  bool all_equal = true;
  SeedSet prefix;
  for (int t = 0; t <= inst.k; ++t) {
    if (t > 0) prefix.insert(trace.seeds[static_cast<std::size_t>(t - 1)]);
    double base = smsm_expected_value(inst, prefix, max_states);
    double weighted = 0.0;  // sum over i outside S of x_i E[Delta(i | theta(S))]
    for (NodeId i = 0; i < inst.n; ++i) {
      if (prefix.contains(i) || x.x[static_cast<std::size_t>(i)] == 0.0) continue;
      weighted += x.x[static_cast<std::size_t>(i)] * detail::smsm_expected_marginal(inst, prefix, i);
    }
    double randomized = 0.0;  // E over rho of E[f(theta(S ∪ {rho}))]
    for (NodeId i = 0; i < inst.n; ++i) {
      if (x.x[static_cast<std::size_t>(i)] == 0.0) continue;
      randomized += x.x[static_cast<std::size_t>(i)] / inst.k *
                    smsm_expected_value(inst, prefix.with(i), max_states);
    }
    double scaled = inst.k * (randomized - base);
    record({{"t", t}, {"relation", "rand_le"}}, weighted, scaled);
    record({{"t", t}, {"relation", "rand_ge"}}, scaled, weighted);
    if (std::abs(scaled - weighted) > tolerance) all_equal = false;

    double hybrid = detail::smsm_hybrid_value(inst, prefix, opt.tree);
    double doubled = detail::smsm_doubled_value(inst, prefix);
    record({{"t", t}, {"relation", "hybrid_upper"}}, hybrid, doubled + weighted);
    record({{"t", t}, {"relation", "opt_le_hybrid"}}, opt.value, hybrid);
  }

  double ratio = trace.values.back() / opt.value;
  record({{"relation", "greedy_ratio"}, {"k", inst.k}},
         smsm_greedy_factor(inst.k) * opt.value, trace.values.back());
  report.notes["all_equality_held"] = all_equal;
  report.notes["min_ratio"] = ratio;
  report.tested = 1;
  return report;
}

// Instance-parallel aggregation of the per-instance verification.
inline CheckReport smsm_check_family(const std::vector<SmsmInstance>& instances,
                                     double tolerance = 1e-9, int workers = 0) {
  std::vector<CheckReport> parts(instances.size());
  parallel_for(
      static_cast<long long>(instances.size()),
      [&](long long i) {
        parts[static_cast<std::size_t>(i)] =
            smsm_check_bounds(instances[static_cast<std::size_t>(i)], tolerance);
      },
      workers > 0 ? workers : hardware_workers());
  CheckReport merged;
  merged.check = "smsm_bounds";
  for (const CheckReport& part : parts) merge_reports(merged, part);
  return merged;
}

// Random instance with binary item states (zero or a positive value), used
// for randomized verification sweeps.
inline SmsmInstance random_smsm_instance(SmsmObjective::Kind kind, int n, int k, Rng& rng) {
  SmsmInstance inst;
  inst.n = n;
  inst.k = k;
  inst.items.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double value = 0.5 + 1.5 * rng.next_double();
    double p = 0.2 + 0.6 * rng.next_double();
    inst.items[static_cast<std::size_t>(i)] = {{0.0, 1.0 - p}, {value, p}};
  }
  inst.objective.kind = kind;
  switch (kind) {
    case SmsmObjective::Kind::Modular:
      for (int i = 0; i < n; ++i) inst.objective.weights.push_back(0.5 + 1.5 * rng.next_double());
      break;
    case SmsmObjective::Kind::CappedSum:
      for (int i = 0; i < n; ++i) inst.objective.weights.push_back(0.5 + 1.5 * rng.next_double());
      inst.objective.cap = 1.0 + 2.0 * rng.next_double();
      break;
    case SmsmObjective::Kind::Coverage: {
      int elements = 2 + static_cast<int>(rng.next_double() * 3.0);
      for (int j = 0; j < elements; ++j) {
        std::vector<double> row;
        for (int i = 0; i < n; ++i) {
          row.push_back(rng.next_double() < 0.5 ? 0.0 : 0.4 + 1.6 * rng.next_double());
        }
        inst.objective.coverage.push_back(std::move(row));
        inst.objective.caps.push_back(0.5 + 1.5 * rng.next_double());
      }
      break;
    }
  }
  return inst;
}

inline nlohmann::json smsm_to_json(const SmsmInstance& inst) {
  nlohmann::json items = nlohmann::json::array();
  for (const ItemDistribution& dist : inst.items) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const StateOutcome& o : dist) {
      outcomes.push_back({{"value", o.value}, {"prob", o.prob}});
    }
    items.push_back(std::move(outcomes));
  }
  nlohmann::json objective;
  switch (inst.objective.kind) {
    case SmsmObjective::Kind::Modular:
      objective = {{"kind", "modular"}, {"weights", inst.objective.weights}};
      break;
    case SmsmObjective::Kind::CappedSum:
      objective = {{"kind", "capped_sum"},
                   {"cap", inst.objective.cap},
                   {"weights", inst.objective.weights}};
      break;
    case SmsmObjective::Kind::Coverage:
      objective = {{"kind", "coverage"},
                   {"matrix", inst.objective.coverage},
                   {"caps", inst.objective.caps}};
      break;
  }
  return {{"n", inst.n}, {"k", inst.k}, {"objective", objective}, {"items", items}};
}

inline SmsmInstance smsm_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("k") ||
      !doc.contains("objective") || !doc.contains("items")) {
    throw Error("smsm instance needs n, k, objective, and items");
  }
  SmsmInstance inst;
  inst.n = doc["n"].get<int>();
  inst.k = doc["k"].get<int>();
  for (const nlohmann::json& dist : doc["items"]) {
    ItemDistribution outcomes;
    for (const nlohmann::json& o : dist) {
      outcomes.push_back({o.at("value").get<double>(), o.at("prob").get<double>()});
    }
    inst.items.push_back(std::move(outcomes));
  }
  const nlohmann::json& objective = doc["objective"];
  std::string kind = objective.at("kind").get<std::string>();
  if (kind == "modular") {
    inst.objective.kind = SmsmObjective::Kind::Modular;
    inst.objective.weights = objective.at("weights").get<std::vector<double>>();
  } else if (kind == "capped_sum") {
    inst.objective.kind = SmsmObjective::Kind::CappedSum;
    inst.objective.cap = objective.at("cap").get<double>();
    inst.objective.weights = objective.at("weights").get<std::vector<double>>();
  } else if (kind == "coverage") {
    inst.objective.kind = SmsmObjective::Kind::Coverage;
    inst.objective.coverage = objective.at("matrix").get<std::vector<std::vector<double>>>();
    inst.objective.caps = objective.at("caps").get<std::vector<double>>();
  } else {
    throw Error("unknown objective kind: " + kind);
  }
  validate_instance(inst);
  return inst;
}

}  // namespace aim
