#include "lrg/scene.hpp"

#include "lrg/error.hpp"

namespace lrg {

Scene prepare_scene(PointCloud cloud, double delta, int pca_k) {
  auto features = compute_features(cloud, pca_k);
  return prepare_scene(std::move(cloud), std::move(features), delta);
}

Scene prepare_scene(PointCloud cloud, FeatureMatrix features, double delta) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  if (features.size() != cloud.size()) throw ContractError("feature rows do not match point count");
  Scene s;
  s.cloud = std::move(cloud);
  s.features = std::move(features);
  s.delta = delta;
  const SpatialIndex index(s.cloud.positions(), delta);
  s.graph = NeighborGraph(index, delta);
  s.unlabeled = InstanceLabels(s.cloud.size());
  return s;
}

}  // namespace lrg
