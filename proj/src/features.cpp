#include "lrg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "lrg/error.hpp"

namespace lrg {

namespace {

constexpr char kFeatureMagic[4] = {'L', 'R', 'G', 'F'};
constexpr std::uint32_t kFeatureVersion = 1;

void canonicalize_sign(Vec3& n) {
  constexpr double kTie = 1e-12;
  bool flip = false;
  if (std::abs(n.z()) > kTie) {
    flip = n.z() < 0.0;
  } else if (std::abs(n.x()) > kTie) {
    flip = n.x() < 0.0;
  } else {
    flip = n.y() < 0.0;
  }
  if (flip) n = -n;
}

}  // namespace

void pca_normal_curvature(std::span<const Vec3> nb, Vec3& normal, double& curvature) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : nb) mean += p;
  mean /= static_cast<double>(nb.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : nb) {
    const Vec3 d = p - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(nb.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Vec3 ev = solver.eigenvalues().cwiseMax(0.0);  // ascending
  const double total = ev.sum();
  if (!(ev[2] > 0.0) || ev[1] <= 1e-10 * ev[2]) {
    normal = Vec3::UnitZ();
    curvature = 0.0;
    return;
  }
  normal = solver.eigenvectors().col(0).normalized();
  canonicalize_sign(normal);
  curvature = ev[0] / total;
}

NormalsCurvature compute_normals_curvature(const PointCloud& cloud, int k, Exec exec) {
  if (k < 3) throw ParameterError("PCA neighborhood size k must be >= 3");
  if (static_cast<std::size_t>(k) > cloud.size())
    throw ParameterError("PCA neighborhood size k=" + std::to_string(k) + " exceeds point count " +
                         std::to_string(cloud.size()));
  const auto& pts = cloud.positions();
  const double extent = std::max(cloud.bounds().extent().maxCoeff(), 1e-6);
  const double cell = std::max(extent / std::cbrt(static_cast<double>(pts.size())), 1e-4);
  const SpatialIndex index(pts, cell);

  NormalsCurvature out;
  out.normals.resize(pts.size());
  out.curvature.resize(pts.size());
  const auto n = static_cast<std::ptrdiff_t>(pts.size());

  auto one = [&](std::ptrdiff_t i, std::vector<Vec3>& scratch) {
    const auto nn = index.knn(pts[static_cast<std::size_t>(i)], static_cast<std::size_t>(k));
    scratch.clear();
    for (auto p : nn) scratch.push_back(pts[p]);
    pca_normal_curvature(scratch, out.normals[static_cast<std::size_t>(i)], out.curvature[static_cast<std::size_t>(i)]);
  };

  if (exec == Exec::serial) {
    std::vector<Vec3> scratch;
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i, scratch);
  } else {
#pragma omp parallel
    {
      std::vector<Vec3> scratch;
#pragma omp for schedule(dynamic, 512)
      for (std::ptrdiff_t i = 0; i < n; ++i) one(i, scratch);
    }
  }
  return out;
}

FeatureMatrix compute_features(const PointCloud& cloud, int k, Exec exec) {
  const auto nc = compute_normals_curvature(cloud, k, exec);
  const auto& b = cloud.bounds();
  const Vec3 ext = b.extent();
  FeatureMatrix f;
  f.rows.resize(static_cast<Eigen::Index>(cloud.size()), kNumFeatures);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Vec3 local = cloud.position(i) - b.min;
    for (int a = 0; a < 3; ++a) {
      f.rows(r, col::kLocalXyz + a) = local[a];
      f.rows(r, col::kRoomXyz + a) = ext[a] > 0.0 ? std::clamp(local[a] / ext[a], 0.0, 1.0) : 0.5;
      f.rows(r, col::kRgb + a) = cloud.color(i)[static_cast<std::size_t>(a)] / 255.0;
      f.rows(r, col::kNormal + a) = nc.normals[i][a];
    }
    f.rows(r, col::kCurvature) = nc.curvature[i];
  }
  return f;
}

void save_features(const FeatureMatrix& f, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  const std::uint64_t n = f.size();
  const std::uint32_t ncol = kNumFeatures;
  os.write(kFeatureMagic, 4);
  os.write(reinterpret_cast<const char*>(&kFeatureVersion), 4);
  os.write(reinterpret_cast<const char*>(&n), 8);
  os.write(reinterpret_cast<const char*>(&ncol), 4);
  os.write(reinterpret_cast<const char*>(f.rows.data()), static_cast<std::streamsize>(n * kNumFeatures * sizeof(double)));
  if (!os) throw IoError("write failed: " + path.string());
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open features: " + path.string());
  char magic[4];
  std::uint32_t version = 0, ncol = 0;
  std::uint64_t n = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&n), 8);
  is.read(reinterpret_cast<char*>(&ncol), 4);
  if (!is || std::memcmp(magic, kFeatureMagic, 4) != 0) throw IoError("not a feature file: " + path.string());
  if (version != kFeatureVersion || ncol != kNumFeatures) throw IoError("unsupported feature file layout: " + path.string());
  FeatureMatrix f;
  f.rows.resize(static_cast<Eigen::Index>(n), kNumFeatures);
  is.read(reinterpret_cast<char*>(f.rows.data()), static_cast<std::streamsize>(n * kNumFeatures * sizeof(double)));
  if (!is) throw IoError("truncated feature file: " + path.string());
  return f;
}

std::vector<PointIndex> query_neighbors(const SpatialIndex& index, std::span<const PointIndex> region,
                                        const InstanceLabels& labels, double delta) {
  std::vector<char> in_region(index.num_points(), 0);
  for (auto p : region) in_region[p] = 1;
  std::vector<char> hit(index.num_points(), 0);
  const auto pts = index.points();
  for (auto q : region) {
    index.for_each_in_radius(pts[q], delta, [&](PointIndex p) {
      if (!in_region[p] && labels[p] == InstanceLabels::kUnassigned) hit[p] = 1;
    });
  }
  std::vector<PointIndex> out;
  for (std::size_t p = 0; p < hit.size(); ++p)
    if (hit[p]) out.push_back(static_cast<PointIndex>(p));
  return out;
}

std::vector<PointIndex> sample_fixed(std::span<const PointIndex> indices, std::size_t count, Rng& rng) {
  if (indices.empty()) throw ContractError("sample_fixed: empty input set");
  if (count == 0) throw ContractError("sample_fixed: count must be >= 1");
  std::vector<PointIndex> out;
  out.reserve(count);
  if (indices.size() >= count) {
    // Partial Fisher-Yates.
    std::vector<PointIndex> pool(indices.begin(), indices.end());
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    out.assign(indices.begin(), indices.end());
    while (out.size() < count) out.push_back(indices[rng.index(indices.size())]);
  }
  return out;
}

template <typename Scalar>
void normalize_inputs(FeatureRows<Scalar>& inliers, FeatureRows<Scalar>& neighbors) {
  const Eigen::Index n = inliers.rows();
  if (n < 1) throw ContractError("normalize_inputs: empty inlier set");
  std::vector<Scalar> column(static_cast<std::size_t>(n));
  const auto mid = static_cast<std::ptrdiff_t>((n - 1) / 2);  // lower median
  for (int c = 0; c < kNumFeatures; ++c) {
    if (c >= col::kRoomXyz && c < col::kRoomXyz + 3) continue;
    for (Eigen::Index r = 0; r < n; ++r) column[static_cast<std::size_t>(r)] = inliers(r, c);
    std::nth_element(column.begin(), column.begin() + mid, column.end());
    const Scalar med = column[static_cast<std::size_t>(mid)];
    inliers.col(c).array() -= med;
    neighbors.col(c).array() -= med;
  }
}

template void normalize_inputs<float>(FeatureRows<float>&, FeatureRows<float>&);
template void normalize_inputs<double>(FeatureRows<double>&, FeatureRows<double>&);

FeatureSet parse_feature_set(std::string_view s) {
  if (s == "full") return FeatureSet::full;
  if (s == "xyz") return FeatureSet::xyz;
  if (s == "xyz_rgb" || s == "xyz-rgb") return FeatureSet::xyz_rgb;
  throw ParameterError("unknown feature set '" + std::string(s) + "' (expected full, xyz, xyz-rgb)");
}

std::string_view to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::full: return "full";
    case FeatureSet::xyz: return "xyz";
    case FeatureSet::xyz_rgb: return "xyz-rgb";
  }
  return "full";
}

bool feature_enabled(FeatureSet s, int column) {
  switch (s) {
    case FeatureSet::full: return true;
    case FeatureSet::xyz: return column < col::kRgb;
    case FeatureSet::xyz_rgb: return column < col::kNormal;
  }
  return true;
}

template <typename Scalar>
NetworkInputs<Scalar> assemble_inputs(const FeatureMatrix& features, std::span<const PointIndex> inlier_idx,
                                      std::span<const PointIndex> neighbor_idx, const InputOptions& opts) {
  NetworkInputs<Scalar> in;
  // Normalize in double, then narrow.
  FeatureRows<double> a(static_cast<Eigen::Index>(inlier_idx.size()), kNumFeatures);
  FeatureRows<double> b(static_cast<Eigen::Index>(neighbor_idx.size()), kNumFeatures);
  for (std::size_t i = 0; i < inlier_idx.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = features.rows.row(inlier_idx[i]);
  for (std::size_t j = 0; j < neighbor_idx.size(); ++j) b.row(static_cast<Eigen::Index>(j)) = features.rows.row(neighbor_idx[j]);
  if (opts.normalize && a.rows() > 0) normalize_inputs<double>(a, b);
  for (int c = 0; c < kNumFeatures; ++c) {
    if (feature_enabled(opts.feature_set, c)) continue;
    a.col(c).setZero();
    b.col(c).setZero();
  }
  in.inliers = a.cast<Scalar>();
  in.neighbors = b.cast<Scalar>();
  return in;
}

template NetworkInputs<float> assemble_inputs<float>(const FeatureMatrix&, std::span<const PointIndex>,
                                                     std::span<const PointIndex>, const InputOptions&);
template NetworkInputs<double> assemble_inputs<double>(const FeatureMatrix&, std::span<const PointIndex>,
                                                       std::span<const PointIndex>, const InputOptions&);

}  // namespace lrg
