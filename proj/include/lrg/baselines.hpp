#pragma once

#include "lrg/pointcloud.hpp"
#include "lrg/scene.hpp"

namespace lrg {

// Flood fill over the delta graph: a neighbor joins when both its normal and its
// unit-scaled color are close to those of the point it was reached from.
struct ThresholdConfig {
  double normal_angle_max = 30.0;  // degrees, normals compared up to sign
  double color_dist_max = 0.25;    // Euclidean, RGB in [0, 1]
  int min_segment = 10;
};

// Smoothness-constrained growing: a neighbor joins on normal angle alone and only
// becomes a growth front when its curvature is low.
struct SmoothnessConfig {
  double theta_max = 10.0;  // degrees
  double curvature_max = 0.05;
  int min_segment = 10;
};

InstanceLabels grow_threshold(const Scene& scene, const ThresholdConfig& cfg = {});
InstanceLabels grow_smoothness(const Scene& scene, const SmoothnessConfig& cfg = {});

}  // namespace lrg
