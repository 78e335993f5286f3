#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace aim {

using NodeId = int;

// Sorted, duplicate-free set of node (or item) ids. Small enough everywhere in
// this library that a flat vector beats tree/hash containers.
class SeedSet {
 public:
  SeedSet() = default;
  SeedSet(std::initializer_list<NodeId> ids) : members_(ids) { normalize(); }
  explicit SeedSet(std::vector<NodeId> ids) : members_(std::move(ids)) { normalize(); }

  static SeedSet from_mask(std::uint64_t mask) {
    SeedSet s;
    for (int v = 0; mask != 0; ++v, mask >>= 1) {
      if (mask & 1) s.members_.push_back(v);
    }
    return s;
  }

  std::uint64_t to_mask() const {
    std::uint64_t mask = 0;
    for (NodeId v : members_) mask |= std::uint64_t{1} << v;
    return mask;
  }

  bool contains(NodeId v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
  }

  void insert(NodeId v) {
    auto it = std::lower_bound(members_.begin(), members_.end(), v);
    if (it == members_.end() || *it != v) members_.insert(it, v);
  }

  void erase(NodeId v) {
    auto it = std::lower_bound(members_.begin(), members_.end(), v);
    if (it != members_.end() && *it == v) members_.erase(it);
  }

  SeedSet with(NodeId v) const {
    SeedSet s = *this;
    s.insert(v);
    return s;
  }

  SeedSet united(const SeedSet& other) const {
    SeedSet s;
    s.members_.reserve(members_.size() + other.members_.size());
    std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                   other.members_.end(), std::back_inserter(s.members_));
    return s;
  }

  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  const std::vector<NodeId>& members() const { return members_; }

  bool operator==(const SeedSet&) const = default;
  // Lexicographic; used to pick canonical witnesses among equal-value optima.
  bool operator<(const SeedSet& other) const { return members_ < other.members_; }

 private:
  void normalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  std::vector<NodeId> members_;
};

}  // namespace aim
