#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lrg/pointcloud.hpp"
#include "lrg/rng.hpp"
#include "lrg/spatial_index.hpp"

namespace lrg {

inline constexpr int kNumFeatures = 13;

// Column layout of a feature row.
namespace col {
inline constexpr int kLocalXyz = 0;
inline constexpr int kRoomXyz = 3;
inline constexpr int kRgb = 6;
inline constexpr int kNormal = 9;
inline constexpr int kCurvature = 12;
}  // namespace col

template <typename Scalar>
using FeatureRows = Eigen::Matrix<Scalar, Eigen::Dynamic, kNumFeatures, Eigen::RowMajor>;

struct FeatureMatrix {
  FeatureRows<double> rows;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  double curvature(std::size_t i) const { return rows(static_cast<Eigen::Index>(i), col::kCurvature); }
  Vec3 normal(std::size_t i) const { return rows.template block<1, 3>(static_cast<Eigen::Index>(i), col::kNormal).transpose(); }
  Vec3 rgb(std::size_t i) const { return rows.template block<1, 3>(static_cast<Eigen::Index>(i), col::kRgb).transpose(); }
};

enum class Exec { serial, parallel };

struct NormalsCurvature {
  std::vector<Vec3> normals;
  std::vector<double> curvature;
};

// PCA over the k nearest neighbors of every point. Normals are sign-canonicalized
// (n.z >= 0, then n.x >= 0, then n.y >= 0); rank-deficient neighborhoods get (0,0,1) and 0.
NormalsCurvature compute_normals_curvature(const PointCloud& cloud, int k, Exec exec = Exec::parallel);

// Normal and curvature of a single neighborhood; exposed for the brute-force oracle tests.
void pca_normal_curvature(std::span<const Vec3> neighborhood, Vec3& normal, double& curvature);

FeatureMatrix compute_features(const PointCloud& cloud, int k = 16, Exec exec = Exec::parallel);

// Binary feature cache: magic, version, N, 13, then N*13 little-endian doubles.
void save_features(const FeatureMatrix& f, const std::filesystem::path& path);
FeatureMatrix load_features(const std::filesystem::path& path);

// Unlabeled points within delta (strict) of any region member, excluding members.
// Ascending index order.
std::vector<PointIndex> query_neighbors(const SpatialIndex& index, std::span<const PointIndex> region,
                                        const InstanceLabels& labels, double delta);

// Exactly `count` draws from `indices`: a uniform sample without replacement when the
// set is large enough, otherwise every member once plus uniform resampling.
std::vector<PointIndex> sample_fixed(std::span<const PointIndex> indices, std::size_t count, Rng& rng);

// Subtract the inlier-set lower median from every column except the room-normalized
// ones, in both sets.
template <typename Scalar>
void normalize_inputs(FeatureRows<Scalar>& inliers, FeatureRows<Scalar>& neighbors);

// Feature subsets used by the ablation harness. Excluded columns are zeroed.
enum class FeatureSet { full, xyz, xyz_rgb };
FeatureSet parse_feature_set(std::string_view s);
std::string_view to_string(FeatureSet s);
bool feature_enabled(FeatureSet s, int column);

struct InputOptions {
  FeatureSet feature_set = FeatureSet::full;
  bool normalize = true;
};

template <typename Scalar>
struct NetworkInputs {
  FeatureRows<Scalar> inliers;
  FeatureRows<Scalar> neighbors;
};

// Gather, normalize and mask the rows for one network evaluation.
template <typename Scalar>
NetworkInputs<Scalar> assemble_inputs(const FeatureMatrix& features, std::span<const PointIndex> inlier_idx,
                                      std::span<const PointIndex> neighbor_idx, const InputOptions& opts);

}  // namespace lrg
