#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/oracle.hpp"

namespace aim {

struct Violation {
  std::string graph;      // edge-list text of the offending instance
  nlohmann::json params;  // check-specific context (seed set, node, ...)
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // lhs - rhs, positive when the bound is broken
};

struct CheckReport {
  std::string check;
  long long tested = 0;
  long long skipped = 0;
  std::vector<Violation> violations;
  // Max of lhs - rhs over everything tested; stays -inf when nothing ran.
  double worst_slack = -std::numeric_limits<double>::infinity();
  nlohmann::json notes = nlohmann::json::object();

  bool passed() const { return violations.empty(); }

  void record(double lhs, double rhs) { worst_slack = std::max(worst_slack, lhs - rhs); }
};

// Folds a per-instance report into an aggregate. Note keys prefixed min_ /
// max_ / all_ combine by min, max, and logical and; anything else is
// last-writer-wins.
inline void merge_reports(CheckReport& into, const CheckReport& part) {
  into.tested += part.tested;
  into.skipped += part.skipped;
  into.violations.insert(into.violations.end(), part.violations.begin(), part.violations.end());
  into.worst_slack = std::max(into.worst_slack, part.worst_slack);
  for (const auto& [key, value] : part.notes.items()) {
    if (!into.notes.contains(key)) {
      into.notes[key] = value;
    } else if (key.rfind("min_", 0) == 0) {
      into.notes[key] = std::min(into.notes[key].get<double>(), value.get<double>());
    } else if (key.rfind("max_", 0) == 0) {
      into.notes[key] = std::max(into.notes[key].get<double>(), value.get<double>());
    } else if (key.rfind("all_", 0) == 0) {
      into.notes[key] = into.notes[key].get<bool>() && value.get<bool>();
    } else {
      into.notes[key] = value;
    }
  }
}

inline nlohmann::json violation_to_json(const Violation& v) {
  return {{"graph", v.graph},
          {"params", v.params},
          {"lhs", v.lhs},
          {"rhs", v.rhs},
          {"slack", v.slack}};
}

inline nlohmann::json check_report_to_json(const CheckReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const Violation& v : report.violations) violations.push_back(violation_to_json(v));
  nlohmann::json out{{"check", report.check},
                     {"tested", report.tested},
                     {"skipped", report.skipped},
                     {"violations", violations},
                     // -inf (nothing tested) serializes as null
                     {"worst_slack", report.worst_slack}};
  if (!report.notes.empty()) out["notes"] = report.notes;
  return out;
}

namespace detail {

inline nlohmann::json tree_node_to_json(const InfluenceGraph& g, const DecisionTree& tree,
                                        int index) {
  const DecisionNode& node = tree.nodes[static_cast<std::size_t>(index)];
  auto out = g.out_edges(node.pick);
  nlohmann::json branches = nlohmann::json::array();
  for (std::size_t mask = 0; mask < node.children.size(); ++mask) {
    nlohmann::json observed = nlohmann::json::array();
    for (std::size_t i = 0; i < out.size(); ++i) {
      if ((mask >> i) & 1) observed.push_back(g.edge(out[i]).target);
    }
    nlohmann::json branch{{"observed", observed}};
    int child = node.children[mask];
    if (child == -1) {
      branch["child"] = nullptr;
    } else {
      branch["child"] = tree_node_to_json(g, tree, child);
    }
    branches.push_back(std::move(branch));
  }
  return {{"pick", node.pick}, {"branches", branches}};
}

inline int tree_node_from_json(const InfluenceGraph& g, const nlohmann::json& doc,
                               DecisionTree& tree) {
  if (!doc.is_object() || !doc.contains("pick") || !doc.contains("branches")) {
    throw MalformedTree("tree node must be an object with pick and branches");
  }
  if (!doc["pick"].is_number_integer()) throw MalformedTree("pick must be an integer");
  NodeId pick = doc["pick"].get<NodeId>();
  if (pick < 0 || pick >= g.node_count()) throw MalformedTree("pick is not a valid node id");
  const nlohmann::json& branches = doc["branches"];
  if (!branches.is_array()) throw MalformedTree("branches must be an array");
  auto out = g.out_edges(pick);
  int deg = static_cast<int>(out.size());
  int index = static_cast<int>(tree.nodes.size());
  tree.nodes.push_back({pick, {}});
  std::vector<int> children(std::size_t{1} << deg, INT_MIN);
  for (const nlohmann::json& branch : branches) {
    if (!branch.is_object() || !branch.contains("observed") || !branch.contains("child")) {
      throw MalformedTree("branch must be an object with observed and child");
    }
    const nlohmann::json& observed = branch["observed"];
    if (!observed.is_array()) throw MalformedTree("observed must be an array of node ids");
    std::uint32_t mask = 0;
    for (const nlohmann::json& entry : observed) {
      if (!entry.is_number_integer()) throw MalformedTree("observed entries must be integers");
      NodeId target = entry.get<NodeId>();
      int pos = -1;
      for (int i = 0; i < deg; ++i) {
        if (g.edge(out[static_cast<std::size_t>(i)]).target == target) {
          pos = i;
          break;
        }
      }
      if (pos < 0) throw MalformedTree("observed node is not an out-neighbour of the pick");
      if ((mask >> pos) & 1) throw MalformedTree("observed node listed twice");
      mask |= std::uint32_t{1} << pos;
    }
    if (children[mask] != INT_MIN) throw MalformedTree("duplicate observation branch");
    const nlohmann::json& child = branch["child"];
    if (child.is_null()) {
      children[mask] = -1;
    } else {
      children[mask] = tree_node_from_json(g, child, tree);
    }
  }
  for (int child : children) {
    if (child == INT_MIN) throw MalformedTree("missing observation branch");
  }
  tree.nodes[static_cast<std::size_t>(index)].children = std::move(children);
  return index;
}

}  // namespace detail

inline nlohmann::json tree_to_json(const InfluenceGraph& g, const DecisionTree& tree) {
  validate_tree(g, tree);
  return {{"k", tree.k}, {"root", detail::tree_node_to_json(g, tree, tree.root)}};
}

inline DecisionTree tree_from_json(const InfluenceGraph& g, const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("k") || !doc.contains("root")) {
    throw MalformedTree("tree document must be an object with k and root");
  }
  if (!doc["k"].is_number_integer()) throw MalformedTree("k must be an integer");
  DecisionTree tree;
  tree.k = doc["k"].get<int>();
  tree.root = detail::tree_node_from_json(g, doc["root"], tree);
  validate_tree(g, tree);
  return tree;
}

}  // namespace aim
