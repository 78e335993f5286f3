#pragma once

#include <charconv>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aim/errors.hpp"
#include "aim/rng.hpp"
#include "aim/seed_set.hpp"

namespace aim {

struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  double prob = 0.0;  // independent activation probability in [0, 1]
};

// Directed influence graph for the independent cascade model. Node ids are
// dense in [0, n). Self-loops and duplicate (source, target) pairs are
// rejected at construction; activation probabilities are kept exactly as
// given, including the degenerate values 0 and 1.
class InfluenceGraph {
 public:
  InfluenceGraph() = default;

  InfluenceGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) throw Error("node count must be non-negative");
    validate_edges();
    build_index();
  }

  // Text format: first content line is n, every following content line is
  // "u v p". Blank lines and lines starting with '#' are skipped.
  static InfluenceGraph parse(std::istream& in) {
    std::string line;
    int line_no = 0;
    long long n = -1;
    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> edge_lines;  // for duplicate reporting
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::string_view sv = trimmed(line);
      if (sv.empty() || sv.front() == '#') continue;
      if (n < 0) {
        if (!parse_int(sv, n) || n < 0) {
          throw ParseError(line_no, "expected non-negative node count, got '" + std::string(sv) + "'");
        }
        continue;
      }
      std::istringstream fields{std::string(sv)};
      std::string us, vs, ps, extra;
      if (!(fields >> us >> vs >> ps) || (fields >> extra)) {
        throw ParseError(line_no, "expected 'u v p', got '" + std::string(sv) + "'");
      }
      long long u = 0, v = 0;
      if (!parse_int(us, u)) throw ParseError(line_no, "bad source id '" + us + "'");
      if (!parse_int(vs, v)) throw ParseError(line_no, "bad target id '" + vs + "'");
      double p = 0.0;
      if (!parse_double(ps, p)) throw ParseError(line_no, "bad probability '" + ps + "'");
      if (u < 0 || u >= n) throw ParseError(line_no, "source id " + us + " outside [0, " + std::to_string(n) + ")");
      if (v < 0 || v >= n) throw ParseError(line_no, "target id " + vs + " outside [0, " + std::to_string(n) + ")");
      if (u == v) throw ParseError(line_no, "self-loop at node " + us);
      if (!(p >= 0.0 && p <= 1.0)) throw ParseError(line_no, "probability " + ps + " outside [0, 1]");
      edges.push_back(Edge{static_cast<NodeId>(u), static_cast<NodeId>(v), p});
      edge_lines.emplace_back(line_no, static_cast<int>(edges.size()) - 1);
    }
    if (n < 0) throw ParseError(line_no == 0 ? 1 : line_no, "missing node count line");
    // Duplicate detection with the offending line number.
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto [ln, idx] : edge_lines) {
      auto key = std::make_pair(edges[idx].source, edges[idx].target);
      if (!seen.insert(key).second) {
        throw ParseError(ln, "duplicate edge " + std::to_string(key.first) + " -> " +
                                 std::to_string(key.second));
      }
    }
    return InfluenceGraph(static_cast<int>(n), std::move(edges));
  }

  static InfluenceGraph parse_text(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  std::string to_text() const {
    std::ostringstream out;
    out << n_ << '\n';
    out << std::setprecision(17);
    for (const Edge& e : edges_) out << e.source << ' ' << e.target << ' ' << e.prob << '\n';
    return out.str();
  }

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Edge indices leaving u, ordered by target id.
  std::span<const int> out_edges(NodeId u) const {
    return {out_index_.data() + out_start_[u], out_index_.data() + out_start_[u + 1]};
  }
  int out_degree(NodeId u) const { return out_start_[u + 1] - out_start_[u]; }

  std::vector<NodeId> out_neighbors(NodeId u) const {
    std::vector<NodeId> result;
    for (int e : out_edges(u)) result.push_back(edges_[e].target);
    return result;
  }

  bool has_edge(NodeId u, NodeId v) const {
    for (int e : out_edges(u)) {
      if (edges_[e].target == v) return true;
    }
    return false;
  }

 private:
  static std::string_view trimmed(std::string_view sv) {
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    return sv;
  }

  static bool parse_int(std::string_view sv, long long& out) {
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
  }

  static bool parse_double(std::string_view sv, double& out) {
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
  }

  void validate_edges() {
    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Edge& e : edges_) {
      if (e.source < 0 || e.source >= n_ || e.target < 0 || e.target >= n_) {
        throw Error("edge endpoint outside [0, n)");
      }
      if (e.source == e.target) throw Error("self-loop at node " + std::to_string(e.source));
      if (!(e.prob >= 0.0 && e.prob <= 1.0)) throw Error("edge probability outside [0, 1]");
      if (!seen.insert({e.source, e.target}).second) {
        throw Error("duplicate edge " + std::to_string(e.source) + " -> " + std::to_string(e.target));
      }
    }
  }

  void build_index() {
    out_start_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) ++out_start_[e.source + 1];
    for (int v = 0; v < n_; ++v) out_start_[v + 1] += out_start_[v];
    out_index_.resize(edges_.size());
    std::vector<int> cursor(out_start_.begin(), out_start_.end() - 1);
    // Two passes keep each adjacency list ordered by target id: edges are
    // first bucketed by source, then sorted inside the bucket.
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      out_index_[cursor[edges_[e].source]++] = e;
    }
    for (int v = 0; v < n_; ++v) {
      std::sort(out_index_.begin() + out_start_[v], out_index_.begin() + out_start_[v + 1],
                [&](int a, int b) { return edges_[a].target < edges_[b].target; });
    }
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> out_start_;
  std::vector<int> out_index_;
};

// One live-edge realisation: a bit per parent edge, in parent edge order.
// Holds a pointer to the parent graph; copies are independent bit vectors.
class LiveEdgeGraph {
 public:
  explicit LiveEdgeGraph(const InfluenceGraph& parent)
      : parent_(&parent), bits_((parent.edge_count() + 63) / 64, 0) {}

  const InfluenceGraph& parent() const { return *parent_; }

  bool present(int e) const { return (bits_[e >> 6] >> (e & 63)) & 1; }

  void set_present(int e, bool live) {
    std::uint64_t bit = std::uint64_t{1} << (e & 63);
    if (live) {
      bits_[e >> 6] |= bit;
    } else {
      bits_[e >> 6] &= ~bit;
    }
  }

  int live_count() const {
    int total = 0;
    for (std::uint64_t w : bits_) total += __builtin_popcountll(w);
    return total;
  }

  bool operator==(const LiveEdgeGraph& other) const {
    return parent_ == other.parent_ && bits_ == other.bits_;
  }

 private:
  const InfluenceGraph* parent_;
  std::vector<std::uint64_t> bits_;
};

// Each edge is kept independently with its activation probability.
inline LiveEdgeGraph sample_live_edge(const InfluenceGraph& g, Rng& rng) {
  LiveEdgeGraph live(g);
  for (int e = 0; e < g.edge_count(); ++e) {
    if (rng.bernoulli(g.edge(e).prob)) live.set_present(e, true);
  }
  return live;
}

// Nodes reachable from `seeds` along live edges; seeds are always included.
inline SeedSet realized_reach(const LiveEdgeGraph& live, const SeedSet& seeds) {
  const InfluenceGraph& g = live.parent();
  std::vector<char> visited(g.node_count(), 0);
  std::vector<NodeId> queue;
  queue.reserve(g.node_count());
  for (NodeId v : seeds) {
    if (v < 0 || v >= g.node_count()) throw Error("seed id outside [0, n)");
    if (!visited[v]) {
      visited[v] = 1;
      queue.push_back(v);
    }
  }
  for (std::size_t i = 0; i < queue.size(); ++i) {
    NodeId u = queue[i];
    for (int e : g.out_edges(u)) {
      NodeId w = g.edge(e).target;
      if (live.present(e) && !visited[w]) {
        visited[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::vector<NodeId> reached;
  reached.reserve(queue.size());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (visited[v]) reached.push_back(v);
  }
  return SeedSet(std::move(reached));
}

inline int realized_spread(const LiveEdgeGraph& live, const SeedSet& seeds) {
  return realized_reach(live, seeds).size();
}

}  // namespace aim
