#include "lrg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "lrg/error.hpp"
#include "lrg/grower.hpp"

namespace lrg {
namespace {

std::vector<PointIndex> curvature_order(const FeatureMatrix& f) {
  std::vector<PointIndex> order(f.rows.rows());
  std::iota(order.begin(), order.end(), PointIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](PointIndex a, PointIndex b) { return f.curvature(a) < f.curvature(b); });
  return order;
}

double cos_of_degrees(double deg) {
  if (!(deg >= 0.0 && deg <= 90.0)) throw ParameterError("angle threshold must lie in [0, 90] degrees");
  return std::cos(deg * std::numbers::pi / 180.0);
}

// Seeds in ascending curvature; `grow(seed, id, labels)` labels one region.
template <typename Grow>
InstanceLabels flood(const Scene& scene, int min_segment, Grow grow) {
  if (min_segment < 1) throw ParameterError("min_segment must be >= 1");
  InstanceLabels labels(scene.size());
  std::int32_t id = 0;
  for (PointIndex seed : curvature_order(scene.features)) {
    if (labels[seed] != InstanceLabels::kUnassigned) continue;
    grow(seed, ++id, labels);
  }
  return reassign_small_segments(scene.cloud, labels, min_segment);
}

}  // namespace

InstanceLabels grow_threshold(const Scene& scene, const ThresholdConfig& cfg) {
  const double min_cos = cos_of_degrees(cfg.normal_angle_max);
  if (!(cfg.color_dist_max >= 0.0)) throw ParameterError("color distance threshold must be >= 0");
  const double max_c2 = cfg.color_dist_max * cfg.color_dist_max;
  const auto& f = scene.features;
  return flood(scene, cfg.min_segment, [&](PointIndex seed, std::int32_t id, InstanceLabels& labels) {
    std::deque<PointIndex> queue{seed};
    labels[seed] = id;
    while (!queue.empty()) {
      const PointIndex p = queue.front();
      queue.pop_front();
      const Vec3 np = f.normal(p), cp = f.rgb(p);
      for (PointIndex q : scene.graph.neighbors(p)) {
        if (labels[q] != InstanceLabels::kUnassigned) continue;
        if (std::abs(np.dot(f.normal(q))) < min_cos) continue;
        if ((cp - f.rgb(q)).squaredNorm() > max_c2) continue;
        labels[q] = id;
        queue.push_back(q);
      }
    }
  });
}

InstanceLabels grow_smoothness(const Scene& scene, const SmoothnessConfig& cfg) {
  const double min_cos = cos_of_degrees(cfg.theta_max);
  const auto& f = scene.features;
  return flood(scene, cfg.min_segment, [&](PointIndex seed, std::int32_t id, InstanceLabels& labels) {
    std::deque<PointIndex> fronts{seed};
    labels[seed] = id;
    while (!fronts.empty()) {
      const PointIndex p = fronts.front();
      fronts.pop_front();
      const Vec3 np = f.normal(p);
      for (PointIndex q : scene.graph.neighbors(p)) {
        if (labels[q] != InstanceLabels::kUnassigned) continue;
        if (std::abs(np.dot(f.normal(q))) < min_cos) continue;
        labels[q] = id;
        if (f.curvature(q) <= cfg.curvature_max) fronts.push_back(q);
      }
    }
  });
}

}  // namespace lrg
