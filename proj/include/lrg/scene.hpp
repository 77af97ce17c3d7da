#pragma once

#include "lrg/features.hpp"
#include "lrg/pointcloud.hpp"
#include "lrg/spatial_index.hpp"

namespace lrg {

inline constexpr double kDefaultDelta = 0.1;
inline constexpr int kDefaultPcaNeighbors = 16;

// A point cloud with everything region growing needs precomputed.
struct Scene {
  PointCloud cloud;
  FeatureMatrix features;
  NeighborGraph graph;
  double delta = kDefaultDelta;
  InstanceLabels unlabeled;  // all-zero labels, used for training-time simulation

  std::size_t size() const { return cloud.size(); }
};

Scene prepare_scene(PointCloud cloud, double delta = kDefaultDelta, int pca_k = kDefaultPcaNeighbors);
// Reuse features computed earlier (e.g. loaded from a feature cache).
Scene prepare_scene(PointCloud cloud, FeatureMatrix features, double delta = kDefaultDelta);

}  // namespace lrg
