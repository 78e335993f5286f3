// Command-line front end: greedy/adaptive seed selection, exact small-instance
// oracles, adaptivity-gap search, and the inequality verification harness.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aim/diffusion.hpp"
#include "aim/errors.hpp"
#include "aim/generators.hpp"
#include "aim/graph.hpp"
#include "aim/oracle.hpp"
#include "aim/policies.hpp"
#include "aim/report.hpp"
#include "aim/rng.hpp"
#include "aim/smsm.hpp"
#include "aim/verify.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::string graph_path;
  std::string generator;
  std::string k_list = "2";
  std::string mode = "exact";
  int samples = 10000;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  std::string checks;
  int max_nodes = 8;
  int max_edges = 20;
  int trials = 1;
};

void add_instance_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--graph", opt.graph_path, "instance file (edge-list text)");
  cmd->add_option("--generator", opt.generator,
                  "generator spec, e.g. chain(4,0.5) or erdos_renyi(5,0.5)");
  cmd->add_option("--trials", opt.trials, "instances drawn from a randomized generator");
  cmd->add_option("--seed", opt.seed, "master seed for generators and sampling");
  cmd->add_option("--out", opt.out, "write the report here instead of stdout");
  cmd->add_option("--format", opt.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--max-edges", opt.max_edges,
                  "cap on undetermined edges per exact enumeration");
}

void add_budget_option(CLI::App* cmd, Options& opt) {
  cmd->add_option("--k", opt.k_list, "seed budget");
}

void add_oracle_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--max-nodes", opt.max_nodes, "node cap for the exact oracles");
}

std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> ks;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string piece = text.substr(start, end - start);
    if (!piece.empty()) {
      int k = 0;
      try {
        std::size_t used = 0;
        k = std::stoi(piece, &used);
        if (used != piece.size()) throw std::invalid_argument(piece);
      } catch (const std::exception&) {
        throw aim::Error("bad budget '" + piece + "' in --k");
      }
      if (k < 1) throw aim::Error("budget must be >= 1, got " + std::to_string(k));
      ks.push_back(k);
    }
    start = end + 1;
  }
  if (ks.empty()) throw aim::Error("--k needs at least one budget");
  return ks;
}

int single_k(const Options& opt) {
  auto ks = parse_k_list(opt.k_list);
  if (ks.size() != 1) throw aim::Error("this command takes a single --k value");
  return ks[0];
}

std::vector<aim::InfluenceGraph> load_family(const Options& opt) {
  if (!opt.graph_path.empty() && !opt.generator.empty()) {
    throw aim::Error("pass either --graph or --generator, not both");
  }
  if (!opt.graph_path.empty()) {
    std::ifstream in(opt.graph_path);
    if (!in) throw aim::Error("cannot open graph file: " + opt.graph_path);
    std::vector<aim::InfluenceGraph> family;
    family.push_back(aim::InfluenceGraph::parse(in));
    return family;
  }
  if (!opt.generator.empty()) {
    return aim::generate_instances(aim::parse_generator_spec(opt.generator), opt.trials,
                                   opt.seed);
  }
  throw aim::Error("one of --graph or --generator is required");
}

std::string instance_label(const Options& opt, std::size_t index) {
  if (!opt.graph_path.empty()) return opt.graph_path;
  return opt.generator + "[" + std::to_string(index) + "]";
}

std::string family_label(const Options& opt) {
  return opt.graph_path.empty() ? opt.generator : opt.graph_path;
}

aim::EnumLimits enum_limits(const Options& opt) {
  aim::EnumLimits limits;
  limits.max_free_bits = opt.max_edges;
  return limits;
}

aim::OracleLimits oracle_limits(const Options& opt) {
  aim::OracleLimits limits;
  limits.max_nodes = opt.max_nodes;
  limits.enum_limits = enum_limits(opt);
  return limits;
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Reports land atomically: written to a sibling temp file, then renamed.
void write_output(const std::string& out, const std::string& payload) {
  if (out.empty()) {
    std::cout << payload;
    return;
  }
  std::filesystem::path target(out);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream file(tmp);
    if (!file) throw aim::Error("cannot write output file: " + out);
    file << payload;
  }
  std::filesystem::rename(tmp, target);
}

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::string csv_number(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

struct CsvRow {
  std::string instance;
  int k = 0;
  std::string algorithm;
  double value = 0.0;
  std::string ratio_vs_opt_a;  // empty when not applicable
  std::string gap;             // empty when not applicable
  double seconds = 0.0;
};

std::string csv_table(const std::vector<CsvRow>& rows) {
  std::string out = "instance,k,algorithm,value,ratio_vs_opt_a,gap,seconds\n";
  for (const CsvRow& row : rows) {
    out += csv_field(row.instance) + ',' + std::to_string(row.k) + ',' + row.algorithm + ',' +
           csv_number(row.value) + ',' + row.ratio_vs_opt_a + ',' + row.gap + ',' +
           csv_number(row.seconds) + '\n';
  }
  return out;
}

void emit(const Options& opt, const json& report, const std::vector<CsvRow>& rows) {
  if (opt.format == "csv") {
    write_output(opt.out, csv_table(rows));
  } else {
    write_output(opt.out, report.dump(2) + "\n");
  }
}

void require_json_format(const Options& opt) {
  if (opt.format != "json") {
    throw aim::Error("this command only supports --format json");
  }
}

json load_json_file(const std::string& path) {
  if (path.empty()) throw aim::Error("--graph with an instance file is required");
  std::ifstream in(path);
  if (!in) throw aim::Error("cannot open instance file: " + path);
  return json::parse(in);
}

int cmd_greedy(const Options& opt, bool adaptive) {
  const int k = single_k(opt);
  const auto family = load_family(opt);
  const aim::EnumLimits limits = enum_limits(opt);

  json instances = json::array();
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const aim::InfluenceGraph& g = family[i];
    if (k > g.node_count()) {
      throw aim::Error("budget " + std::to_string(k) + " exceeds node count " +
                       std::to_string(g.node_count()));
    }
    Timer timer;
    json entry;
    entry["instance"] = instance_label(opt, i);
    entry["n"] = g.node_count();
    entry["k"] = k;
    double value = 0.0;
    if (!adaptive) {
      entry["algorithm"] = "greedy";
      aim::GreedyTrace trace;
      if (opt.mode == "exact") {
        aim::ExactSpreadEvaluator evaluator(g, limits);
        trace = aim::nonadaptive_greedy(g, k, evaluator);
      } else {
        if (opt.samples < 1) throw aim::Error("--samples must be >= 1");
        aim::FrozenBatchEvaluator evaluator(
            g, opt.samples, aim::Rng::mix(opt.seed + 2 * static_cast<std::uint64_t>(i)));
        trace = aim::nonadaptive_greedy(g, k, evaluator);
        entry["samples"] = opt.samples;
      }
      value = trace.values.back();
      entry["seeds"] = trace.seeds;
      entry["values"] = trace.values;
    } else {
      entry["algorithm"] = "adaptive_greedy";
      if (opt.mode == "exact") {
        aim::AdaptivePolicy policy = aim::adaptive_greedy(g, k, aim::ExactMode{limits});
        value = aim::evaluate_policy(g, policy, aim::ExactMode{limits});
      } else {
        if (opt.samples < 1) throw aim::Error("--samples must be >= 1");
        aim::McMode build{opt.samples,
                          aim::Rng::mix(opt.seed + 2 * static_cast<std::uint64_t>(i))};
        aim::McMode eval{opt.samples,
                         aim::Rng::mix(opt.seed + 2 * static_cast<std::uint64_t>(i) + 1)};
        aim::AdaptivePolicy policy = aim::adaptive_greedy(g, k, build);
        aim::SpreadEstimate estimate = aim::evaluate_policy(g, policy, eval);
        value = estimate.mean;
        entry["samples"] = estimate.samples;
        entry["half_width"] = estimate.half_width;
      }
    }
    entry["value"] = value;
    entry["seconds"] = timer.seconds();
    rows.push_back({instance_label(opt, i), k, entry["algorithm"].get<std::string>(), value, "",
                    "", timer.seconds()});
    instances.push_back(std::move(entry));
  }

  json report;
  report["command"] = adaptive ? "adaptive-greedy" : "greedy";
  report["family"] = family_label(opt);
  report["k"] = k;
  report["mode"] = opt.mode;
  report["seed"] = opt.seed;
  report["instances"] = std::move(instances);
  emit(opt, report, rows);
  return 0;
}

int cmd_oracle(const Options& opt) {
  const int k = single_k(opt);
  const auto family = load_family(opt);
  const aim::OracleLimits limits = oracle_limits(opt);

  json instances = json::array();
  json witness_docs = json::array();
  std::vector<CsvRow> rows;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const aim::InfluenceGraph& g = family[i];
    Timer timer;
    aim::NonadaptiveOracleResult non = aim::opt_nonadaptive(g, k, limits);
    aim::AdaptiveOracleResult ada = aim::opt_adaptive(g, k, limits);
    const double gap = ada.value / non.value;
    json tree = aim::tree_to_json(g, ada.tree);

    json entry;
    entry["instance"] = instance_label(opt, i);
    entry["n"] = g.node_count();
    entry["k"] = k;
    entry["opt_n"] = non.value;
    entry["opt_n_seeds"] = non.best.members();
    entry["opt_a"] = ada.value;
    entry["gap"] = gap;
    entry["tree"] = tree;
    entry["seconds"] = timer.seconds();
    instances.push_back(std::move(entry));
    witness_docs.push_back(json{{"instance", instance_label(opt, i)}, {"tree", tree}});
    rows.push_back({instance_label(opt, i), k, "oracle", ada.value, "", csv_number(gap),
                    timer.seconds()});
  }

  json report;
  report["command"] = "oracle";
  report["family"] = family_label(opt);
  report["k"] = k;
  report["seed"] = opt.seed;
  report["instances"] = std::move(instances);
  emit(opt, report, rows);
  if (!opt.out.empty()) {
    json side = family.size() == 1 ? witness_docs[0]["tree"] : witness_docs;
    write_output(opt.out + ".tree.json", side.dump(2) + "\n");
  }
  return 0;
}

int cmd_gap_search(const Options& opt) {
  const int k = single_k(opt);
  const auto family = load_family(opt);
  aim::CheckConfig cfg;
  cfg.enum_limits = enum_limits(opt);
  cfg.oracle_limits = oracle_limits(opt);

  Timer timer;
  aim::GapSearchResult result = aim::search_gap_witness(family, k, 0.0, cfg);

  json report;
  report["command"] = "gap-search";
  report["family"] = family_label(opt);
  report["k"] = k;
  report["seed"] = opt.seed;
  report["tested"] = result.ceiling.tested;
  report["skipped"] = result.ceiling.skipped;
  report["best_index"] = result.best_index;
  if (result.best_index >= 0) {
    report["best"] = {{"opt_n", result.best.opt_n},
                      {"opt_a", result.best.opt_a},
                      {"gap", result.best.gap}};
    report["best_graph"] = result.best_graph;
  }
  report["ceiling"] = aim::check_report_to_json(result.ceiling);
  report["seconds"] = timer.seconds();

  std::vector<CsvRow> rows;
  if (result.best_index >= 0) {
    rows.push_back({result.best_index < static_cast<int>(family.size())
                        ? instance_label(opt, static_cast<std::size_t>(result.best_index))
                        : "",
                    k, "gap-search", result.best.gap, "", csv_number(result.best.gap),
                    timer.seconds()});
  }
  emit(opt, report, rows);
  return result.ceiling.violations.empty() ? 0 : 3;
}

int cmd_verify(const Options& opt) {
  require_json_format(opt);
  const auto ks = parse_k_list(opt.k_list);
  const auto family = load_family(opt);

  std::vector<std::string> ids;
  if (opt.checks.empty()) {
    ids = aim::all_check_ids();
  } else {
    std::size_t start = 0;
    while (start <= opt.checks.size()) {
      std::size_t end = opt.checks.find(',', start);
      if (end == std::string::npos) end = opt.checks.size();
      std::string id = opt.checks.substr(start, end - start);
      if (!id.empty()) ids.push_back(id);
      start = end + 1;
    }
    if (ids.empty()) throw aim::Error("--checks selected no check ids");
    const auto& known = aim::all_check_ids();
    for (const std::string& id : ids) {
      if (std::find(known.begin(), known.end(), id) == known.end()) {
        throw aim::Error("unknown check id: " + id);
      }
    }
  }

  aim::CheckConfig cfg;
  cfg.enum_limits = enum_limits(opt);
  cfg.oracle_limits = oracle_limits(opt);

  Timer timer;
  json reports = json::array();
  std::size_t total_violations = 0;
  for (const std::string& id : ids) {
    aim::CheckReport merged;
    merged.check = id;
    for (int k : ks) {
      aim::CheckReport part = aim::run_check(id, family, k, cfg);
      aim::merge_reports(merged, part);
    }
    total_violations += merged.violations.size();
    reports.push_back(aim::check_report_to_json(merged));
  }

  json report;
  report["command"] = "verify";
  report["family"] = family_label(opt);
  report["instances"] = family.size();
  report["k"] = ks;
  report["seed"] = opt.seed;
  report["checks"] = std::move(reports);
  report["violations"] = total_violations;
  report["seconds"] = timer.seconds();
  emit(opt, report, {});
  return total_violations == 0 ? 0 : 3;
}

int cmd_smsm_greedy(const Options& opt) {
  require_json_format(opt);
  aim::SmsmInstance inst = aim::smsm_from_json(load_json_file(opt.graph_path));

  Timer timer;
  aim::GreedyTrace trace = aim::smsm_greedy(inst);

  json report;
  report["command"] = "smsm-greedy";
  report["instance"] = opt.graph_path;
  report["n"] = inst.n;
  report["k"] = inst.k;
  report["seed"] = opt.seed;
  report["items"] = trace.seeds;
  report["values"] = trace.values;
  report["value"] = trace.values.empty() ? 0.0 : trace.values.back();
  report["seconds"] = timer.seconds();
  emit(opt, report, {});
  return 0;
}

int cmd_smsm_verify(const Options& opt) {
  require_json_format(opt);
  aim::SmsmInstance inst = aim::smsm_from_json(load_json_file(opt.graph_path));

  Timer timer;
  aim::CheckReport check = aim::smsm_check_bounds(inst);

  json report;
  report["command"] = "smsm-verify";
  report["instance"] = opt.graph_path;
  report["n"] = inst.n;
  report["k"] = inst.k;
  report["seed"] = opt.seed;
  report["checks"] = json::array({aim::check_report_to_json(check)});
  report["violations"] = check.violations.size();
  report["seconds"] = timer.seconds();
  emit(opt, report, {});
  return check.violations.empty() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"influence maximization toolkit: greedy policies, exact oracles, and "
               "inequality verification"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* greedy = app.add_subcommand("greedy", "non-adaptive greedy seed selection");
  add_instance_options(greedy, opt);
  add_budget_option(greedy, opt);
  greedy->add_option("--mode", opt.mode, "exact enumeration or Monte Carlo")
      ->check(CLI::IsMember({"exact", "mc"}));
  greedy->add_option("--samples", opt.samples, "Monte Carlo samples per estimate");

  CLI::App* adaptive = app.add_subcommand("adaptive-greedy", "adaptive greedy policy value");
  add_instance_options(adaptive, opt);
  add_budget_option(adaptive, opt);
  adaptive->add_option("--mode", opt.mode, "exact enumeration or Monte Carlo")
      ->check(CLI::IsMember({"exact", "mc"}));
  adaptive->add_option("--samples", opt.samples, "Monte Carlo samples per estimate");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "exact non-adaptive and adaptive optima with a witness policy tree");
  add_instance_options(oracle, opt);
  add_budget_option(oracle, opt);
  add_oracle_options(oracle, opt);

  CLI::App* gap = app.add_subcommand("gap-search", "largest adaptivity gap over a family");
  add_instance_options(gap, opt);
  add_budget_option(gap, opt);
  add_oracle_options(gap, opt);

  CLI::App* verify = app.add_subcommand("verify", "run inequality checks over a family");
  add_instance_options(verify, opt);
  verify->add_option("--k", opt.k_list, "comma-separated budgets, e.g. 2,3");
  add_oracle_options(verify, opt);
  verify->add_option("--checks", opt.checks, "comma-separated check ids (default: all)");

  CLI::App* smsm_greedy = app.add_subcommand(
      "smsm-greedy", "greedy for a stochastic monotone submodular instance (JSON file)");
  add_instance_options(smsm_greedy, opt);

  CLI::App* smsm_verify = app.add_subcommand(
      "smsm-verify", "bound checks for a stochastic monotone submodular instance");
  add_instance_options(smsm_verify, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (greedy->parsed()) return cmd_greedy(opt, false);
    if (adaptive->parsed()) return cmd_greedy(opt, true);
    if (oracle->parsed()) return cmd_oracle(opt);
    if (gap->parsed()) return cmd_gap_search(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (smsm_greedy->parsed()) return cmd_smsm_greedy(opt);
    if (smsm_verify->parsed()) return cmd_smsm_verify(opt);
    throw aim::Error("no subcommand selected");
  } catch (const aim::EnumerationTooLarge& e) {
    std::cerr << "refusing oversized enumeration: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
