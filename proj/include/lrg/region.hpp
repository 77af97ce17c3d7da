#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrg/pointcloud.hpp"
#include "lrg/spatial_index.hpp"

namespace lrg {

// Set of point indices with O(1) insert/erase/contains and random access.
class IndexedSet {
 public:
  explicit IndexedSet(std::size_t universe = 0) : pos_(universe, kAbsent) {}

  bool contains(PointIndex p) const { return pos_[p] != kAbsent; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::span<const PointIndex> items() const { return items_; }

  bool insert(PointIndex p) {
    if (contains(p)) return false;
    pos_[p] = static_cast<std::uint32_t>(items_.size());
    items_.push_back(p);
    return true;
  }

  bool erase(PointIndex p) {
    if (!contains(p)) return false;
    const std::uint32_t at = pos_[p];
    const PointIndex last = items_.back();
    items_[at] = last;
    pos_[last] = at;
    items_.pop_back();
    pos_[p] = kAbsent;
    return true;
  }

 private:
  static constexpr std::uint32_t kAbsent = 0xffffffffu;
  std::vector<PointIndex> items_;
  std::vector<std::uint32_t> pos_;
};

// A growing point set together with its delta-frontier: the unlabeled, non-member
// points within delta of some member. The frontier is maintained incrementally
// through per-point cover counts over the delta-neighbor graph.
class Region {
 public:
  Region(const NeighborGraph& graph, const InstanceLabels& labels);

  void add(PointIndex p);
  void remove(PointIndex p);

  bool contains(PointIndex p) const { return members_.contains(p); }
  std::size_t size() const { return members_.size(); }
  std::span<const PointIndex> members() const { return members_.items(); }
  std::span<const PointIndex> frontier() const { return frontier_.items(); }

  std::vector<PointIndex> sorted_members() const;

 private:
  bool eligible(PointIndex p) const { return (*labels_)[p] == InstanceLabels::kUnassigned; }

  const NeighborGraph* graph_;
  const InstanceLabels* labels_;
  IndexedSet members_;
  IndexedSet frontier_;
  std::vector<std::uint32_t> cover_;
};

// Q_k plus bookkeeping for one region-growing run.
struct RegionState {
  Region region;
  PointIndex seed = 0;
  int step = 0;
  int stagnant_steps = 0;
  double loglik = 0.0;

  RegionState(const NeighborGraph& graph, const InstanceLabels& labels, PointIndex seed_point)
      : region(graph, labels), seed(seed_point) {
    region.add(seed_point);
  }
};

std::uint64_t membership_hash(const Region& r);

}  // namespace lrg
