#include "lrg/region.hpp"

#include <algorithm>

#include "lrg/error.hpp"
#include "lrg/rng.hpp"

namespace lrg {

Region::Region(const NeighborGraph& graph, const InstanceLabels& labels)
    : graph_(&graph), labels_(&labels), members_(graph.size()), frontier_(graph.size()), cover_(graph.size(), 0) {
  if (labels.size() != graph.size()) throw ContractError("region: labels/graph size mismatch");
}

void Region::add(PointIndex p) {
  if (!members_.insert(p)) return;
  frontier_.erase(p);
  for (auto q : graph_->neighbors(p)) {
    if (++cover_[q] == 1 && !members_.contains(q) && eligible(q)) frontier_.insert(q);
  }
}

void Region::remove(PointIndex p) {
  if (!members_.erase(p)) return;
  for (auto q : graph_->neighbors(p)) {
    if (--cover_[q] == 0) frontier_.erase(q);
  }
  if (cover_[p] > 0 && eligible(p)) frontier_.insert(p);
}

std::vector<PointIndex> Region::sorted_members() const {
  std::vector<PointIndex> m(members().begin(), members().end());
  std::sort(m.begin(), m.end());
  return m;
}

std::uint64_t membership_hash(const Region& r) {
  // Order-independent: sum and xor of mixed indices.
  std::uint64_t s = 0, x = 0;
  for (auto p : r.members()) {
    const auto h = mix64(p);
    s += h;
    x ^= mix64(h);
  }
  return mix64(s ^ mix64(x) ^ r.size());
}

}  // namespace lrg
