#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <vector>

#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/rng.hpp"

namespace aim {

// Probability law for the activation weight of a generated edge.
struct WeightLaw {
  enum class Kind { Fixed, Uniform, Grid };
  Kind kind = Kind::Uniform;
  double value = 0.5;              // Fixed
  std::vector<double> grid;        // Grid: uniform over these values

  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::Fixed:
        return value;
      case Kind::Uniform:
        return rng.next_double();
      case Kind::Grid:
        return grid[static_cast<std::size_t>(rng.next_u64() % grid.size())];
    }
    return value;
  }

  static WeightLaw fixed(double p) { return {Kind::Fixed, p, {}}; }
  static WeightLaw uniform() { return {Kind::Uniform, 0.0, {}}; }
  static WeightLaw from_grid(std::vector<double> values) {
    if (values.empty()) throw Error("weight grid must be non-empty");
    return {Kind::Grid, 0.0, std::move(values)};
  }
};

inline InfluenceGraph make_chain(int n, double p) {
  if (n < 1) throw Error("chain needs at least one node");
  std::vector<Edge> edges;
  for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, p});
  return InfluenceGraph(n, edges);
}

// Star with center 0 and `leaves` out-edges.
inline InfluenceGraph make_star(int leaves, double p) {
  if (leaves < 0) throw Error("star needs a non-negative leaf count");
  std::vector<Edge> edges;
  for (int v = 1; v <= leaves; ++v) edges.push_back({0, v, p});
  return InfluenceGraph(leaves + 1, edges);
}

// Complete bipartite a -> b with uniform probability p.
inline InfluenceGraph make_bipartite(int a, int b, double p) {
  if (a < 0 || b < 0) throw Error("bipartite sides must be non-negative");
  std::vector<Edge> edges;
  for (int u = 0; u < a; ++u) {
    for (int v = 0; v < b; ++v) edges.push_back({u, a + v, p});
  }
  return InfluenceGraph(a + b, edges);
}

// Each ordered pair becomes an edge with probability edge_prob; present edges
// draw their activation probability from the weight law.
inline InfluenceGraph make_erdos_renyi(int n, double edge_prob, const WeightLaw& law, Rng& rng) {
  if (n < 1) throw Error("random graph needs at least one node");
  if (edge_prob < 0.0 || edge_prob > 1.0) throw Error("edge probability must be in [0, 1]");
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      if (rng.bernoulli(edge_prob)) edges.push_back({u, v, law.sample(rng)});
    }
  }
  return InfluenceGraph(n, edges);
}

namespace detail {

// Guards census-style generators against accidental explosion.
inline constexpr long long kMaxCensusInstances = 2'000'000;

inline std::vector<std::pair<int, int>> ordered_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (u != v) pairs.emplace_back(u, v);
    }
  }
  return pairs;
}

}  // namespace detail

// Every influence graph with up to n_max nodes where each ordered pair is
// either absent or carries a probability from the grid. Absent and p = 0 are
// distinct on purpose: degenerate edges exercise the conditioning logic.
inline std::vector<InfluenceGraph> exhaustive_small(int n_max, const std::vector<double>& grid) {
  if (n_max < 1) throw Error("exhaustive family needs n_max >= 1");
  if (grid.empty()) throw Error("probability grid must be non-empty");
  long long total = 0;
  for (int n = 1; n <= n_max; ++n) {
    long long count = 1;
    long long pairs = static_cast<long long>(n) * (n - 1);
    for (long long i = 0; i < pairs; ++i) {
      count *= static_cast<long long>(grid.size()) + 1;
      if (count > detail::kMaxCensusInstances) {
        throw EnumerationTooLarge("exhaustive family instances", count,
                                  detail::kMaxCensusInstances);
      }
    }
    total += count;
    if (total > detail::kMaxCensusInstances) {
      throw EnumerationTooLarge("exhaustive family instances", total,
                                detail::kMaxCensusInstances);
    }
  }
  std::vector<InfluenceGraph> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int n = 1; n <= n_max; ++n) {
    auto pairs = detail::ordered_pairs(n);
    std::vector<int> choice(pairs.size(), 0);  // 0 = absent, j = grid[j-1]
    for (;;) {
      std::vector<Edge> edges;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (choice[i] > 0) edges.push_back({pairs[i].first, pairs[i].second, grid[choice[i] - 1]});
      }
      out.emplace_back(n, edges);
      std::size_t i = 0;
      while (i < pairs.size() && choice[i] == static_cast<int>(grid.size())) choice[i++] = 0;
      if (i == pairs.size()) break;
      ++choice[i];
    }
  }
  return out;
}

// Every edge structure on exactly n nodes, each instance using one uniform
// probability drawn from the grid for all of its edges. Complements the
// exhaustive family at sizes where the per-edge census is out of reach.
inline std::vector<InfluenceGraph> uniform_structures(int n, const std::vector<double>& grid) {
  if (n < 1) throw Error("structure family needs n >= 1");
  if (grid.empty()) throw Error("probability grid must be non-empty");
  auto pairs = detail::ordered_pairs(n);
  if (pairs.size() > 24) {
    throw EnumerationTooLarge("structure family bits", static_cast<long long>(pairs.size()), 24);
  }
  long long structures = 1LL << pairs.size();
  long long total = structures * static_cast<long long>(grid.size());
  if (total > detail::kMaxCensusInstances) {
    throw EnumerationTooLarge("structure family instances", total, detail::kMaxCensusInstances);
  }
  std::vector<InfluenceGraph> out;
  out.reserve(static_cast<std::size_t>(total));
  for (long long mask = 0; mask < structures; ++mask) {
    for (double p : grid) {
      std::vector<Edge> edges;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if ((mask >> i) & 1) edges.push_back({pairs[i].first, pairs[i].second, p});
      }
      out.emplace_back(n, edges);
    }
  }
  return out;
}

// Generator specs as accepted on the command line, e.g.
//   chain(4,0.5) | star(3,0.7) | bipartite(2,2,0.5)
//   erdos_renyi(5,0.5) | erdos_renyi(5,0.5,uniform|const:0.3|grid:0:0.5:1)
//   exhaustive_small(3,0:0.3:0.7:1) | uniform_structures(4,0:0.3:0.7:1)
struct GeneratorSpec {
  std::string name;
  std::vector<std::string> args;
};

namespace detail {

inline double parse_double_arg(const std::string& s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("bad numeric argument '" + s + "' in generator spec");
  }
  return value;
}

inline int parse_int_arg(const std::string& s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("bad integer argument '" + s + "' in generator spec");
  }
  return value;
}

inline std::vector<double> parse_grid_arg(const std::string& s) {
  std::vector<double> grid;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(':', start);
    if (end == std::string::npos) end = s.size();
    grid.push_back(parse_double_arg(s.substr(start, end - start)));
    start = end + 1;
  }
  return grid;
}

inline WeightLaw parse_weight_law(const std::string& s) {
  if (s == "uniform") return WeightLaw::uniform();
  if (s.rfind("const:", 0) == 0) return WeightLaw::fixed(parse_double_arg(s.substr(6)));
  if (s.rfind("grid:", 0) == 0) return WeightLaw::from_grid(parse_grid_arg(s.substr(5)));
  throw Error("unknown weight law '" + s + "' (expected uniform, const:P, or grid:a:b:...)");
}

}  // namespace detail

inline GeneratorSpec parse_generator_spec(const std::string& text) {
  std::size_t open = text.find('(');
  if (open == std::string::npos || text.back() != ')') {
    throw Error("generator spec must look like name(arg,arg,...): got '" + text + "'");
  }
  GeneratorSpec spec;
  spec.name = text.substr(0, open);
  std::string body = text.substr(open + 1, text.size() - open - 2);
  std::size_t start = 0;
  while (start < body.size()) {
    std::size_t end = body.find(',', start);
    if (end == std::string::npos) end = body.size();
    std::string arg = body.substr(start, end - start);
    while (!arg.empty() && arg.front() == ' ') arg.erase(arg.begin());
    while (!arg.empty() && arg.back() == ' ') arg.pop_back();
    if (!arg.empty()) spec.args.push_back(arg);
    start = end + 1;
  }
  if (spec.name.empty()) throw Error("generator spec has no name: '" + text + "'");
  return spec;
}

// Materializes a family. Randomized generators produce `trials` instances
// from streams derived off the master seed; deterministic and census
// generators ignore `trials`.
inline std::vector<InfluenceGraph> generate_instances(const GeneratorSpec& spec, int trials,
                                                      std::uint64_t master_seed) {
  const auto& a = spec.args;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (a.size() < lo || a.size() > hi) {
      throw Error("generator '" + spec.name + "' got " + std::to_string(a.size()) + " arguments");
    }
  };
  if (spec.name == "chain") {
    need(2, 2);
    return {make_chain(detail::parse_int_arg(a[0]), detail::parse_double_arg(a[1]))};
  }
  if (spec.name == "star") {
    need(2, 2);
    return {make_star(detail::parse_int_arg(a[0]), detail::parse_double_arg(a[1]))};
  }
  if (spec.name == "bipartite") {
    need(3, 3);
    return {make_bipartite(detail::parse_int_arg(a[0]), detail::parse_int_arg(a[1]),
                           detail::parse_double_arg(a[2]))};
  }
  if (spec.name == "erdos_renyi") {
    need(2, 3);
    int n = detail::parse_int_arg(a[0]);
    double edge_prob = detail::parse_double_arg(a[1]);
    WeightLaw law = a.size() == 3 ? detail::parse_weight_law(a[2]) : WeightLaw::uniform();
    if (trials < 1) throw Error("randomized generator needs trials >= 1");
    std::vector<InfluenceGraph> out;
    out.reserve(trials);
    for (int i = 0; i < trials; ++i) {
      Rng rng = Rng::derive(master_seed, static_cast<std::uint64_t>(i));
      out.push_back(make_erdos_renyi(n, edge_prob, law, rng));
    }
    return out;
  }
  if (spec.name == "exhaustive_small") {
    need(2, 2);
    return exhaustive_small(detail::parse_int_arg(a[0]), detail::parse_grid_arg(a[1]));
  }
  if (spec.name == "uniform_structures") {
    need(2, 2);
    return uniform_structures(detail::parse_int_arg(a[0]), detail::parse_grid_arg(a[1]));
  }
  throw Error("unknown generator '" + spec.name + "'");
}

}  // namespace aim
