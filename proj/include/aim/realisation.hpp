#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "aim/errors.hpp"
#include "aim/graph.hpp"
#include "aim/seed_set.hpp"

namespace aim {

// What a seed reveals under myopic feedback: itself plus the targets of its
// live out-edges.
inline std::vector<NodeId> observe(const LiveEdgeGraph& live, NodeId v) {
  const InfluenceGraph& g = live.parent();
  if (v < 0 || v >= g.node_count()) throw Error("observed node outside [0, n)");
  std::vector<NodeId> seen{v};
  for (int e : g.out_edges(v)) {
    if (live.present(e)) seen.push_back(g.edge(e).target);
  }
  std::sort(seen.begin(), seen.end());
  return seen;
}

// Map from already-selected seeds to their observations. Entries are kept
// sorted by seed id with sorted observation lists, so equal realisations
// compare and hash equal regardless of selection order.
class PartialRealisation {
 public:
  struct Entry {
    NodeId seed;
    std::vector<NodeId> observed;  // sorted, always contains `seed`
    bool operator==(const Entry&) const = default;
  };

  PartialRealisation() = default;

  void add(NodeId seed, std::vector<NodeId> observed) {
    std::sort(observed.begin(), observed.end());
    observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
    if (!std::binary_search(observed.begin(), observed.end(), seed)) {
      throw InconsistentRealisation("observation of node " + std::to_string(seed) +
                                    " does not contain the node itself");
    }
    auto it = std::lower_bound(entries_.begin(), entries_.end(), seed,
                               [](const Entry& e, NodeId v) { return e.seed < v; });
    if (it != entries_.end() && it->seed == seed) {
      throw InconsistentRealisation("node " + std::to_string(seed) + " observed twice");
    }
    entries_.insert(it, Entry{seed, std::move(observed)});
  }

  bool contains(NodeId seed) const { return find(seed) != nullptr; }

  // Null when `seed` has not been observed.
  const std::vector<NodeId>* observation(NodeId seed) const {
    const Entry* e = find(seed);
    return e ? &e->observed : nullptr;
  }

  SeedSet domain() const {
    std::vector<NodeId> dom;
    dom.reserve(entries_.size());
    for (const Entry& e : entries_) dom.push_back(e.seed);
    return SeedSet(std::move(dom));
  }

  SeedSet image() const {
    SeedSet im;
    for (const Entry& e : entries_) {
      for (NodeId v : e.observed) im.insert(v);
    }
    return im;
  }

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }

  bool subrealisation_of(const PartialRealisation& other) const {
    for (const Entry& e : entries_) {
      const Entry* o = other.find(e.seed);
      if (o == nullptr || o->observed != e.observed) return false;
    }
    return true;
  }

  // Restriction to the seeds in `dom` that are present here.
  PartialRealisation restricted_to(const SeedSet& dom) const {
    PartialRealisation result;
    for (const Entry& e : entries_) {
      if (dom.contains(e.seed)) result.entries_.push_back(e);
    }
    return result;
  }

  // Each entry must name the seed plus a subset of its out-neighbours.
  void validate_against(const InfluenceGraph& g) const {
    for (const Entry& e : entries_) {
      if (e.seed < 0 || e.seed >= g.node_count()) {
        throw InconsistentRealisation("seed id outside [0, n)");
      }
      for (NodeId v : e.observed) {
        if (v == e.seed) continue;
        if (!g.has_edge(e.seed, v)) {
          throw InconsistentRealisation("observation of node " + std::to_string(e.seed) +
                                        " names " + std::to_string(v) +
                                        ", which is not an out-neighbour");
        }
      }
    }
  }

  bool operator==(const PartialRealisation&) const = default;

  std::uint64_t hash() const {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (const Entry& e : entries_) {
      h = Rng::mix(h ^ static_cast<std::uint64_t>(e.seed + 1));
      for (NodeId v : e.observed) h = Rng::mix(h ^ (static_cast<std::uint64_t>(v) << 8));
    }
    return h;
  }

 private:
  const Entry* find(NodeId seed) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), seed,
                               [](const Entry& e, NodeId v) { return e.seed < v; });
    return (it != entries_.end() && it->seed == seed) ? &*it : nullptr;
  }

  std::vector<Entry> entries_;
};

struct PartialRealisationHash {
  std::size_t operator()(const PartialRealisation& psi) const {
    return static_cast<std::size_t>(psi.hash());
  }
};

}  // namespace aim
