#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lrg/pointcloud.hpp"

namespace lrg {

using PointIndex = std::uint32_t;

// Uniform voxel grid over the bounding box of a point set. Every point lives in
// exactly one cell; cells are stored CSR-style (cell_start_ / cell_points_).
class SpatialIndex {
 public:
  SpatialIndex(std::span<const Vec3> points, double cell_size);

  double cell_size() const { return cell_; }
  std::size_t num_points() const { return points_.size(); }
  std::size_t num_cells() const { return cell_start_.size() - 1; }
  std::span<const Vec3> points() const { return points_; }

  // Points p with |p - q| < radius (strict), ascending index order.
  std::vector<PointIndex> radius(const Vec3& q, double radius) const;

  // The k nearest points to q (q itself included when it is in the set),
  // ordered by (distance, index). Returns fewer than k only if the set is smaller.
  std::vector<PointIndex> knn(const Vec3& q, std::size_t k) const;

  template <typename F>
  void for_each_in_radius(const Vec3& q, double radius, F&& visit) const {
    const double r2 = radius * radius;
    std::array<long, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0L, cell_coord(q[a] - radius, a));
      hi[a] = std::min(dims_[a] - 1, cell_coord(q[a] + radius, a));
      if (lo[a] > hi[a]) return;
    }
    for (long z = lo[2]; z <= hi[2]; ++z)
      for (long y = lo[1]; y <= hi[1]; ++y)
        for (long x = lo[0]; x <= hi[0]; ++x) {
          const std::size_t c = linear(x, y, z);
          for (std::uint32_t s = cell_start_[c]; s < cell_start_[c + 1]; ++s) {
            const PointIndex p = cell_points_[s];
            if ((points_[p] - q).squaredNorm() < r2) visit(p);
          }
        }
  }

 private:
  long cell_coord(double v, int axis) const { return static_cast<long>(std::floor((v - origin_[axis]) / cell_)); }
  std::size_t linear(long x, long y, long z) const {
    return static_cast<std::size_t>((z * dims_[1] + y) * dims_[0] + x);
  }

  std::span<const Vec3> points_;
  double cell_;
  Vec3 origin_;
  std::array<long, 3> dims_{};
  std::vector<std::uint32_t> cell_start_;
  std::vector<PointIndex> cell_points_;
};

// CSR adjacency of the strict delta-ball graph (self excluded), neighbors in ascending order.
class NeighborGraph {
 public:
  NeighborGraph() = default;
  NeighborGraph(const SpatialIndex& index, double delta);

  double delta() const { return delta_; }
  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const PointIndex> neighbors(PointIndex p) const {
    return {adj_.data() + offsets_[p], adj_.data() + offsets_[p + 1]};
  }

 private:
  double delta_ = 0.0;
  std::vector<std::size_t> offsets_;
  std::vector<PointIndex> adj_;
};

}  // namespace lrg
