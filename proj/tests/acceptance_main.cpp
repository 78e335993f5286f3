// Acceptance harness: one line per criterion, nonzero exit when any fails.
// Everything runs in exact mode; randomized pieces use fixed seeds so reruns
// are bit-identical.

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aim/diffusion.hpp"
#include "aim/generators.hpp"
#include "aim/graph.hpp"
#include "aim/oracle.hpp"
#include "aim/policies.hpp"
#include "aim/smsm.hpp"
#include "aim/thresholds.hpp"
#include "aim/verify.hpp"

using namespace aim;

namespace {

int g_failures = 0;
std::map<int, std::string> g_lines;

void report(int criterion, bool pass, const std::string& detail) {
  g_lines[criterion] = std::string(pass ? "PASS" : "FAIL") + " - " + detail;
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), format, value);
  return buffer;
}

const std::vector<double>& prob_grid() {
  static const std::vector<double> grid{0.0, 0.3, 0.7, 1.0};
  return grid;
}

// Every graph on up to 3 nodes with all edge-probability combinations, plus
// every 4-node structure at each uniform probability. Covers all shapes the
// exact oracles can sweep in seconds while still exercising n = 4 topologies.
std::vector<InfluenceGraph> oracle_family() {
  std::vector<InfluenceGraph> family = exhaustive_small(3, prob_grid());
  std::vector<InfluenceGraph> four = uniform_structures(4, prob_grid());
  family.insert(family.end(), four.begin(), four.end());
  return family;
}

struct SharedSweep {
  long long runs = 0;
  double worst_nonadaptive_margin = 1e18;  // greedy_n - factor(k) * opt_a
  double worst_adaptive_margin = 1e18;     // greedy_a - factor(k) * opt_a
  double worst_baseline_margin = 1e18;     // greedy_n - (1 - 1/e) * opt_n
  double worst_gap_margin = 1e18;          // ceiling(k) - gap
  double worst_global_gap_margin = 1e18;   // global ceiling - gap
  double worst_replay_error = 0.0;         // |tree replay - induction value|
  double worst_dominance_margin = 1e18;    // opt_a - opt_n
  double max_gap = 0.0;
};

SharedSweep run_shared_sweep(const std::vector<InfluenceGraph>& family) {
  SharedSweep s;
  for (const InfluenceGraph& g : family) {
    for (int k : {2, 3}) {
      if (k > g.node_count()) continue;
      ++s.runs;
      double opt_n = opt_nonadaptive(g, k).value;
      AdaptiveOracleResult opt = opt_adaptive(g, k);
      ExactSpreadEvaluator eval(g);
      double greedy_n = nonadaptive_greedy(g, k, eval).values.back();
      AdaptivePolicy greedy_policy = adaptive_greedy(g, k, ExactMode{});
      double greedy_a = evaluate_policy(g, greedy_policy, ExactMode{});
      double replay = evaluate_decision_tree(g, opt.tree);
      double gap = opt.value / opt_n;

      s.worst_nonadaptive_margin =
          std::min(s.worst_nonadaptive_margin, greedy_n - nonadaptive_greedy_factor(k) * opt.value);
      s.worst_adaptive_margin =
          std::min(s.worst_adaptive_margin, greedy_a - adaptive_greedy_factor(k) * opt.value);
      s.worst_baseline_margin =
          std::min(s.worst_baseline_margin, greedy_n - submodular_greedy_factor() * opt_n);
      s.worst_gap_margin = std::min(s.worst_gap_margin, gap_ceiling(k) - gap);
      s.worst_global_gap_margin = std::min(s.worst_global_gap_margin, gap_ceiling_limit() - gap);
      s.worst_replay_error = std::max(s.worst_replay_error, std::abs(replay - opt.value));
      s.worst_dominance_margin = std::min(s.worst_dominance_margin, opt.value - opt_n);
      s.max_gap = std::max(s.max_gap, gap);
    }
  }
  return s;
}

// Random five-node instances for the gap-ceiling scan.
std::vector<InfluenceGraph> random_family(int count) {
  Rng rng(424242);
  WeightLaw law;  // uniform weights in [0, 1]
  std::vector<InfluenceGraph> family;
  family.reserve(count);
  for (int i = 0; i < count; ++i) family.push_back(make_erdos_renyi(5, 0.5, law, rng));
  return family;
}

struct StrongBoundAudit {
  bool ok = true;
  long long violations = 0;
  std::string detail;
};

// The conditional optimal-value bound is not a theorem; the checker is
// expected to find violations. This audit demands that it does, and that
// every reported violation withstands an independent recomputation of both
// sides from the recorded instance and realisation.
StrongBoundAudit audit_strong_bound(const CheckReport& report, int k) {
  StrongBoundAudit audit;
  audit.violations = static_cast<long long>(report.violations.size());
  if (report.violations.empty()) {
    audit.ok = false;
    audit.detail = "expected the conditional bound to fail somewhere, found no violations";
    return audit;
  }
  struct Entry {
    InfluenceGraph g;
    AdaptiveOracleResult opt;
  };
  std::map<std::string, std::unique_ptr<Entry>> cache;
  for (const Violation& v : report.violations) {
    if (!(v.slack > 1e-9) || std::abs(v.slack - (v.lhs - v.rhs)) > 1e-12) {
      audit.ok = false;
      audit.detail = "violation bookkeeping is inconsistent";
      return audit;
    }
    std::unique_ptr<Entry>& entry = cache[v.graph];
    if (!entry) {
      entry = std::make_unique<Entry>();
      entry->g = InfluenceGraph::parse_text(v.graph);
      entry->opt = opt_adaptive(entry->g, k);
    }
    if (std::abs(entry->opt.value - v.lhs) > 1e-9) {
      audit.ok = false;
      audit.detail = "recorded lhs does not match the recomputed adaptive optimum";
      return audit;
    }
    PartialRealisation psi;
    for (const auto& item : v.params.at("psi")) {
      psi.add(item.at("seed").get<NodeId>(), item.at("observed").get<std::vector<NodeId>>());
    }
    AdaptivePolicy pi = tree_policy(entry->g, entry->opt.tree);
    if (std::abs(strong_hybrid_value(entry->g, psi, pi) - v.rhs) > 1e-9) {
      audit.ok = false;
      audit.detail = "recorded rhs does not match the recomputed conditional hybrid";
      return audit;
    }
  }
  audit.detail = std::to_string(audit.violations) + " violations across " +
                 std::to_string(cache.size()) + " instances, each re-verified";
  return audit;
}

void criteria_1_2_3_6_8() {
  std::vector<InfluenceGraph> family = oracle_family();
  SharedSweep s = run_shared_sweep(family);
  std::string runs = std::to_string(s.runs);

  report(1, s.worst_nonadaptive_margin >= -1e-9,
         "exact non-adaptive greedy stayed above its guarantee factor of the adaptive optimum "
         "on " + runs + " oracle runs (worst margin " +
         fmt("%+.3e", s.worst_nonadaptive_margin) + ")");
  report(2, s.worst_adaptive_margin >= -1e-9,
         "exact adaptive greedy stayed above its guarantee factor of the adaptive optimum on " +
         runs + " oracle runs (worst margin " + fmt("%+.3e", s.worst_adaptive_margin) + ")");

  std::vector<InfluenceGraph> random = random_family(500);
  SharedSweep r = run_shared_sweep(random);
  bool gap_ok = s.worst_gap_margin >= -1e-9 && r.worst_gap_margin >= -1e-9 &&
                s.worst_global_gap_margin >= -1e-9 && r.worst_global_gap_margin >= -1e-9;
  report(3, gap_ok,
         "every adaptivity gap respected the budget ceiling and the global 3.164 ceiling on " +
         std::to_string(s.runs + r.runs) + " runs (largest gap " +
         fmt("%.6f", std::max(s.max_gap, r.max_gap)) + ")");

  report(6, s.worst_baseline_margin >= -1e-9,
         "exact non-adaptive greedy stayed above (1 - 1/e) of the non-adaptive optimum on " +
         runs + " oracle runs (worst margin " + fmt("%+.3e", s.worst_baseline_margin) + ")");
  report(8, s.worst_replay_error <= 1e-12 && s.worst_dominance_margin >= -1e-9,
         "every witness tree replayed to the induction value within 1e-12 and the adaptive "
         "optimum dominated the non-adaptive one on " + runs + " oracle runs (worst replay "
         "error " + fmt("%.3e", s.worst_replay_error) + ")");
}

void criterion_4() {
  std::vector<InfluenceGraph> family = exhaustive_small(3, prob_grid());
  const int k = 2;
  bool clean_ok = true;
  std::string failed_check;
  double worst_clean_slack = -1e18;
  CheckReport strong_report;
  for (const std::string& id : all_check_ids()) {
    CheckReport report = run_check(id, family, k);
    if (id == "opt_bound_strong") {
      strong_report = std::move(report);
      continue;
    }
    if (!report.passed()) {
      clean_ok = false;
      if (failed_check.empty()) failed_check = id;
    }
    worst_clean_slack = std::max(worst_clean_slack, report.worst_slack);
  }
  StrongBoundAudit audit = audit_strong_bound(strong_report, k);
  std::string detail;
  if (!clean_ok) {
    detail = "bound check '" + failed_check + "' reported violations on the exhaustive family";
  } else if (!audit.ok) {
    detail = "conditional optimal-value bound audit failed: " + audit.detail;
  } else {
    detail = "nine bound checks clean over 15651 instances (worst slack " +
             fmt("%.3e", worst_clean_slack) + "); the conditional optimal-value bound " +
             "failed as expected, " + audit.detail;
  }
  report(4, clean_ok && audit.ok, detail);
}

void criterion_5() {
  Rng rng(5150);
  std::vector<SmsmInstance> instances;
  const SmsmObjective::Kind kinds[] = {SmsmObjective::Kind::Modular,
                                       SmsmObjective::Kind::CappedSum,
                                       SmsmObjective::Kind::Coverage};
  for (int i = 0; i < 200; ++i) {
    int k = 2 + (i % 2);
    int n = k + static_cast<int>(rng.next_double() * (6 - k));  // k..5
    if (n > 5) n = 5;
    instances.push_back(random_smsm_instance(kinds[i % 3], n, k, rng));
  }
  CheckReport report_all = smsm_check_family(instances);
  bool equality = report_all.notes.at("all_equality_held").get<bool>();
  double min_ratio = report_all.notes.at("min_ratio").get<double>();
  report(5, report_all.passed() && equality,
         "randomized identity, hybrid bounds, and greedy ratio clean on 200 random instances "
         "across the three objective families (worst greedy ratio " + fmt("%.4f", min_ratio) +
         ")");
}

void criterion_7() {
  InfluenceGraph g = InfluenceGraph::parse_text(
      "6\n0 1 0.5\n0 2 0.5\n1 3 0.5\n2 3 0.5\n3 4 0.5\n4 5 0.5\n1 5 0.3\n2 4 0.7\n");
  double exact = exact_spread(g, SeedSet{0});
  int covered = 0;
  for (int seed = 0; seed < 200; ++seed) {
    SpreadEstimate est = estimate_spread(g, SeedSet{0}, 10000, static_cast<std::uint64_t>(seed));
    if (std::abs(est.mean - exact) <= est.half_width) ++covered;
  }
  report(7, covered >= 190,
         "estimator mean landed within its reported half-width on " + std::to_string(covered) +
         "/200 master seeds at 10000 samples (needs 190)");
}

}  // namespace

int main() {
  criteria_1_2_3_6_8();
  criterion_4();
  criterion_5();
  criterion_7();
  g_lines[9] =
      "INFO - asymptotic constants (0.316, 0.393, 3.164) are large-budget limits and known "
      "lower-bound instances are out of desk-scale reach; the harness reports best-found gaps "
      "and ratios without asserting them";
  for (const auto& [criterion, line] : g_lines) {
    std::printf("criterion %d: %s\n", criterion, line.c_str());
  }
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
