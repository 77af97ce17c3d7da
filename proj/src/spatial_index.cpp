#include "lrg/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "lrg/error.hpp"

namespace lrg {

SpatialIndex::SpatialIndex(std::span<const Vec3> points, double cell_size) : points_(points), cell_(cell_size) {
  if (!(cell_size > 0.0)) throw ParameterError("spatial index cell size must be positive");
  if (points.empty()) throw ContractError("spatial index over an empty point set");
  Vec3 lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  origin_ = lo;
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    dims_[a] = static_cast<long>(std::floor((hi[a] - lo[a]) / cell_)) + 1;
    total *= static_cast<std::size_t>(dims_[a]);
  }
  if (total > (std::size_t{1} << 28)) throw ParameterError("spatial index grid too fine for the scene extent");

  std::vector<std::uint32_t> cell_of(points.size());
  cell_start_.assign(total + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const long x = std::min(dims_[0] - 1, cell_coord(p.x(), 0));
    const long y = std::min(dims_[1] - 1, cell_coord(p.y(), 1));
    const long z = std::min(dims_[2] - 1, cell_coord(p.z(), 2));
    cell_of[i] = static_cast<std::uint32_t>(linear(x, y, z));
    ++cell_start_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < total; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_points_.resize(points.size());
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) cell_points_[fill[cell_of[i]]++] = static_cast<PointIndex>(i);
}

std::vector<PointIndex> SpatialIndex::radius(const Vec3& q, double r) const {
  std::vector<PointIndex> out;
  for_each_in_radius(q, r, [&](PointIndex p) { out.push_back(p); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointIndex> SpatialIndex::knn(const Vec3& q, std::size_t k) const {
  using Entry = std::pair<double, PointIndex>;  // (squared distance, index); max-heap on (d2, idx)
  std::priority_queue<Entry> heap;
  if (k == 0) return {};

  std::array<long, 3> c0{};
  for (int a = 0; a < 3; ++a) c0[a] = std::clamp(cell_coord(q[a], a), 0L, dims_[a] - 1);
  const long max_ring = std::max({dims_[0], dims_[1], dims_[2]});

  auto visit_cell = [&](long x, long y, long z) {
    const std::size_t c = linear(x, y, z);
    for (std::uint32_t s = cell_start_[c]; s < cell_start_[c + 1]; ++s) {
      const PointIndex p = cell_points_[s];
      const Entry e{(points_[p] - q).squaredNorm(), p};
      if (heap.size() < k) {
        heap.push(e);
      } else if (e < heap.top()) {
        heap.pop();
        heap.push(e);
      }
    }
  };

  for (long r = 0; r <= max_ring; ++r) {
    for (long z = c0[2] - r; z <= c0[2] + r; ++z) {
      if (z < 0 || z >= dims_[2]) continue;
      for (long y = c0[1] - r; y <= c0[1] + r; ++y) {
        if (y < 0 || y >= dims_[1]) continue;
        const bool yz_shell = (std::abs(z - c0[2]) == r) || (std::abs(y - c0[1]) == r);
        if (yz_shell) {
          for (long x = std::max(0L, c0[0] - r); x <= std::min(dims_[0] - 1, c0[0] + r); ++x) visit_cell(x, y, z);
        } else {
          if (c0[0] - r >= 0) visit_cell(c0[0] - r, y, z);
          if (r > 0 && c0[0] + r < dims_[0]) visit_cell(c0[0] + r, y, z);
        }
      }
    }
    if (heap.size() == k) {
      // Distance from q to the outside of the visited block of cells.
      double bound = std::numeric_limits<double>::infinity();
      for (int a = 0; a < 3; ++a) {
        const double lo_edge = origin_[a] + static_cast<double>(c0[a] - r) * cell_;
        const double hi_edge = origin_[a] + static_cast<double>(c0[a] + r + 1) * cell_;
        if (c0[a] - r > 0) bound = std::min(bound, q[a] - lo_edge);
        if (c0[a] + r + 1 < dims_[a]) bound = std::min(bound, hi_edge - q[a]);
      }
      if (bound == std::numeric_limits<double>::infinity() || heap.top().first < bound * bound) break;
    }
  }

  std::vector<PointIndex> out(heap.size());
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = heap.top().second;
    heap.pop();
  }
  return out;
}

NeighborGraph::NeighborGraph(const SpatialIndex& index, double delta) : delta_(delta) {
  const auto pts = index.points();
  const std::size_t n = pts.size();
  std::vector<std::vector<PointIndex>> lists(n);
#pragma omp parallel for schedule(dynamic, 256)
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = lists[i];
    index.for_each_in_radius(pts[i], delta, [&](PointIndex p) {
      if (p != i) l.push_back(p);
    });
    std::sort(l.begin(), l.end());
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + lists[i].size();
  adj_.resize(offsets_[n]);
  for (std::size_t i = 0; i < n; ++i) std::copy(lists[i].begin(), lists[i].end(), adj_.begin() + offsets_[i]);
}

}  // namespace lrg
