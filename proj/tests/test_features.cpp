#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "helpers.hpp"
#include "lrg/error.hpp"
#include "lrg/features.hpp"
#include "oracles.hpp"

using namespace lrg;

namespace {

std::vector<Vec3> sphere_points(int n, double r) {
  std::vector<Vec3> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rho = std::sqrt(1.0 - z * z);
    pts.push_back(r * Vec3(rho * std::cos(golden * i), rho * std::sin(golden * i), z));
  }
  return pts;
}

std::vector<Vec3> random_points(std::mt19937& g, std::size_t n, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(g), u(g), u(g));
  return pts;
}

}  // namespace

TEST_CASE("plane normals are vertical with zero curvature") {
  std::vector<Vec3> pts;
  testing::add_grid(pts, 10, 10, 0.05);
  const auto nc = compute_normals_curvature(testing::make_cloud(pts), 8);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(std::abs(std::abs(nc.normals[i].z()) - 1.0) < 1e-9);
    CHECK(nc.curvature[i] < 1e-9);
  }
}

TEST_CASE("sphere normals and curvature match brute-force PCA") {
  const auto pts = sphere_points(400, 1.0);
  const int k = 16;
  const auto nc = compute_normals_curvature(testing::make_cloud(pts), k);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto ref = oracle::pca(pts, i, k);
    CHECK(nc.curvature[i] > 0.0);
    CHECK(std::abs(nc.curvature[i] - ref.curvature) < 1e-9);
    CHECK(std::abs(std::abs(nc.normals[i].dot(ref.normal)) - 1.0) < 1e-9);
  }
}

TEST_CASE("random clouds match brute-force PCA and respect the invariants") {
  std::mt19937 g(7);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pts = random_points(g, 300, 1.0);
    const auto nc = compute_normals_curvature(testing::make_cloud(pts), 16);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto ref = oracle::pca(pts, i, 16);
      CHECK(std::abs(nc.curvature[i] - ref.curvature) < 1e-9);
      CHECK(std::abs(std::abs(nc.normals[i].dot(ref.normal)) - 1.0) < 1e-9);
      CHECK(std::abs(nc.normals[i].norm() - 1.0) < 1e-6);
      CHECK(nc.curvature[i] >= 0.0);
      CHECK(nc.curvature[i] <= 1.0 / 3.0 + 1e-9);
      const Vec3& n = nc.normals[i];
      CHECK(n.z() >= -1e-12);
    }
  }
}

TEST_CASE("rank-deficient neighborhoods fall back") {
  std::vector<Vec3> line;
  for (int i = 0; i < 10; ++i) line.emplace_back(0.1 * i, 0.2 * i, -0.05 * i);
  const auto nc = compute_normals_curvature(testing::make_cloud(line), 5);
  for (std::size_t i = 0; i < line.size(); ++i) {
    CHECK(nc.normals[i] == Vec3(0, 0, 1));
    CHECK(nc.curvature[i] == 0.0);
  }
  Vec3 n;
  double c = 1.0;
  const std::vector<Vec3> same(4, Vec3(1, 1, 1));
  pca_normal_curvature(same, n, c);
  CHECK(n == Vec3(0, 0, 1));
  CHECK(c == 0.0);
}

TEST_CASE("sign canonicalization") {
  Vec3 n;
  double c;
  // Vertical plane x = 0: normal along x, z component zero, so n.x >= 0 decides.
  std::vector<Vec3> wall;
  testing::add_grid(wall, 4, 4, 0.1);
  for (auto& p : wall) p = Vec3(0.0, p.x(), p.y());
  pca_normal_curvature(wall, n, c);
  CHECK(n.isApprox(Vec3(1, 0, 0), 1e-9));
  // Plane y = 0: n = +-(0,1,0); x and z are zero, so n.y >= 0 decides.
  for (auto& p : wall) p = Vec3(p.y(), 0.0, p.z());
  pca_normal_curvature(wall, n, c);
  CHECK(n.isApprox(Vec3(0, 1, 0), 1e-9));
}

TEST_CASE("neighborhood size is validated") {
  std::vector<Vec3> pts;
  testing::add_grid(pts, 2, 2, 0.1);
  const auto cloud = testing::make_cloud(pts);
  CHECK_THROWS_AS(compute_normals_curvature(cloud, 5), ParameterError);
  CHECK_THROWS_AS(compute_normals_curvature(cloud, 2), ParameterError);
  CHECK_NOTHROW(compute_normals_curvature(cloud, 4));
}

TEST_CASE("serial and parallel feature computation agree bitwise") {
  std::mt19937 g(2);
  const auto cloud = testing::make_cloud(random_points(g, 2000, 2.0));
  const auto a = compute_features(cloud, 16, Exec::serial);
  const auto b = compute_features(cloud, 16, Exec::parallel);
  CHECK(a.rows == b.rows);
}

TEST_CASE("feature columns") {
  // Room 4 x 4 x 2.5 with corners present.
  std::vector<Vec3> pts;
  testing::add_grid(pts, 5, 5, 1.0);
  pts.emplace_back(0, 0, 2.5);
  pts.emplace_back(4, 4, 2.5);
  pts.emplace_back(2, 2, 1.25);
  std::vector<Rgb> colors(pts.size(), Rgb{10, 20, 30});
  colors.back() = Rgb{255, 0, 0};
  for (auto& p : pts) p += Vec3(10, -3, 7);  // features are relative to the min corner
  const PointCloud cloud(pts, colors);
  const auto f = compute_features(cloud, 4);
  REQUIRE(f.rows.cols() == kNumFeatures);
  const auto last = static_cast<Eigen::Index>(pts.size() - 1);
  CHECK(f.rows.row(last).segment<3>(col::kLocalXyz).isApprox(Eigen::RowVector3d(2, 2, 1.25)));
  CHECK(f.rows.row(last).segment<3>(col::kRoomXyz).isApprox(Eigen::RowVector3d(0.5, 0.5, 0.5)));
  CHECK(f.rows.row(last).segment<3>(col::kRgb) == Eigen::RowVector3d(1.0, 0.0, 0.0));
  CHECK(f.rows.row(last - 1).segment<3>(col::kRoomXyz) == Eigen::RowVector3d(1, 1, 1));
  CHECK(f.rows.row(0).segment<3>(col::kRgb).isApprox(Eigen::RowVector3d(10 / 255.0, 20 / 255.0, 30 / 255.0)));
  for (Eigen::Index i = 0; i < f.rows.rows(); ++i)
    for (int c = col::kRoomXyz; c < col::kRoomXyz + 3; ++c) {
      CHECK(f.rows(i, c) >= 0.0);
      CHECK(f.rows(i, c) <= 1.0);
    }
}

TEST_CASE("flat extent maps to 0.5") {
  std::vector<Vec3> pts;
  testing::add_grid(pts, 4, 4, 0.1);
  const auto f = compute_features(testing::make_cloud(pts), 4);
  for (Eigen::Index i = 0; i < f.rows.rows(); ++i) CHECK(f.rows(i, col::kRoomXyz + 2) == 0.5);
}

TEST_CASE("feature cache round-trip") {
  testing::TempDir dir;
  std::mt19937 g(4);
  const auto f = compute_features(testing::make_cloud(random_points(g, 100, 1.0)), 8);
  save_features(f, dir / "f.lrgf");
  CHECK(load_features(dir / "f.lrgf").rows == f.rows);
  testing::write_text(dir / "bad.lrgf", "LRGF");
  CHECK_THROWS_AS(load_features(dir / "bad.lrgf"), Error);
}

TEST_CASE("spatial index radius and knn agree with brute force") {
  std::mt19937 g(9);
  for (double cell : {0.05, 0.1, 0.37}) {
    const auto pts = random_points(g, 500, 1.0);
    const SpatialIndex index(pts, cell);
    std::uniform_real_distribution<double> u(-0.2, 1.2);
    for (int q = 0; q < 50; ++q) {
      const Vec3 c(u(g), u(g), u(g));
      CHECK(index.radius(c, 0.1) == oracle::radius(pts, c, 0.1));
      CHECK(index.knn(c, 7) == oracle::knn(pts, c, 7));
    }
    CHECK(index.knn(pts[0], 1000).size() == pts.size());
  }
}

TEST_CASE("neighbor graph matches brute force") {
  std::mt19937 g(12);
  const auto pts = random_points(g, 400, 1.0);
  const SpatialIndex index(pts, 0.1);
  const NeighborGraph graph(index, 0.1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto ref = oracle::radius(pts, pts[i], 0.1);
    ref.erase(std::find(ref.begin(), ref.end(), static_cast<PointIndex>(i)));
    const auto nb = graph.neighbors(static_cast<PointIndex>(i));
    CHECK(std::vector<PointIndex>(nb.begin(), nb.end()) == ref);
  }
}

TEST_CASE("query_neighbors") {
  SUBCASE("whole cloud has no neighbors") {
    std::vector<Vec3> pts;
    testing::add_grid(pts, 5, 5, 0.05);
    const SpatialIndex index(pts, 0.1);
    std::vector<PointIndex> all(pts.size());
    std::iota(all.begin(), all.end(), 0u);
    CHECK(query_neighbors(index, all, InstanceLabels(pts.size()), 0.1).empty());
  }
  SUBCASE("strict inequality on a line") {
    std::vector<Vec3> pts;
    for (int i = -10; i <= 10; ++i) pts.emplace_back(0.05 * i, 0, 0);  // +-0.1 exactly representable
    const SpatialIndex index(pts, 0.1);
    const std::vector<PointIndex> mid{10};
    CHECK(query_neighbors(index, mid, InstanceLabels(pts.size()), 0.1) == std::vector<PointIndex>{9, 11});
  }
  SUBCASE("random regions match a brute-force scan; labeled points never returned") {
    std::mt19937 g(21);
    for (int trial = 0; trial < 30; ++trial) {
      const auto pts = random_points(g, 300, 1.0);
      const SpatialIndex index(pts, 0.1);
      InstanceLabels labels(pts.size());
      std::bernoulli_distribution lab(0.3), mem(0.05);
      std::set<PointIndex> region;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (lab(g)) labels[i] = 1;
        if (mem(g)) region.insert(static_cast<PointIndex>(i));
      }
      region.insert(0);
      const std::vector<PointIndex> rv(region.begin(), region.end());
      const auto got = query_neighbors(index, rv, labels, 0.1);
      CHECK(got == oracle::frontier(pts, region, labels, 0.1));
      for (auto p : got) CHECK(labels[p] == 0);
    }
  }
}

TEST_CASE("sample_fixed") {
  Rng rng(5);
  const std::vector<PointIndex> three{4, 8, 15};
  const auto s = sample_fixed(three, 5, rng);
  CHECK(s.size() == 5);
  for (auto v : s) CHECK(std::find(three.begin(), three.end(), v) != three.end());
  for (auto v : three) CHECK(std::find(s.begin(), s.end(), v) != s.end());

  std::vector<PointIndex> many(600);
  std::iota(many.begin(), many.end(), 0u);
  const auto d = sample_fixed(many, 512, rng);
  CHECK(d.size() == 512);
  CHECK(std::set<PointIndex>(d.begin(), d.end()).size() == 512);

  Rng a(77), b(77);
  CHECK(sample_fixed(many, 100, a) == sample_fixed(many, 100, b));
  CHECK_THROWS_AS(sample_fixed(std::vector<PointIndex>{}, 3, rng), ContractError);
  CHECK_THROWS_AS(sample_fixed(three, 0, rng), ContractError);
}

TEST_CASE("sample_fixed draws uniformly") {
  Rng rng(1);
  std::vector<PointIndex> ten(10);
  std::iota(ten.begin(), ten.end(), 0u);
  std::vector<int> hits(10, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t)
    for (auto v : sample_fixed(ten, 3, rng)) ++hits[v];
  for (int h : hits) CHECK(std::abs(h / double(trials) - 0.3) < 0.02);
}

TEST_CASE("normalize_inputs") {
  FeatureRows<double> in(3, kNumFeatures), nb(1, kNumFeatures);
  in.setZero();
  nb.setZero();
  in.col(0) << 3, 1, 2;
  nb(0, 0) = 5;
  in.col(col::kRoomXyz) << 0.7, 0.1, 0.2;
  nb(0, col::kRoomXyz) = 0.9;
  normalize_inputs(in, nb);
  CHECK(in(0, 0) == 1);
  CHECK(in(1, 0) == -1);
  CHECK(in(2, 0) == 0);
  CHECK(nb(0, 0) == 3);
  CHECK(in(0, col::kRoomXyz) == 0.7);
  CHECK(nb(0, col::kRoomXyz) == 0.9);

  SUBCASE("lower median on even counts") {
    FeatureRows<double> e(4, kNumFeatures), n2(1, kNumFeatures);
    e.setZero();
    n2.setZero();
    e.col(12) << 4, 1, 3, 2;  // lower median 2
    normalize_inputs(e, n2);
    CHECK(e(0, 12) == 2);
    CHECK(n2(0, 12) == -2);
  }
  SUBCASE("single inlier becomes zero in normalized columns") {
    FeatureRows<double> one(1, kNumFeatures), n1(2, kNumFeatures);
    one.setRandom();
    n1.setRandom();
    const auto keep = one;
    normalize_inputs(one, n1);
    for (int c = 0; c < kNumFeatures; ++c) {
      if (c >= col::kRoomXyz && c < col::kRoomXyz + 3)
        CHECK(one(0, c) == keep(0, c));
      else
        CHECK(one(0, c) == 0.0);
    }
  }
  SUBCASE("idempotent") {
    std::mt19937 g(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
      FeatureRows<double> a(7 + trial, kNumFeatures), b(5, kNumFeatures);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(g);
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = u(g);
      normalize_inputs(a, b);
      const auto a1 = a, b1 = b;
      normalize_inputs(a, b);
      CHECK(a == a1);
      CHECK(b == b1);
    }
  }
}

TEST_CASE("feature subsets zero the excluded columns") {
  std::mt19937 g(8);
  const auto f = compute_features(testing::make_cloud(random_points(g, 50, 1.0)), 8);
  const std::vector<PointIndex> in{0, 1, 2}, nb{3, 4};
  for (auto set : {FeatureSet::full, FeatureSet::xyz, FeatureSet::xyz_rgb}) {
    const auto x = assemble_inputs<float>(f, in, nb, {set, true});
    for (int c = 0; c < kNumFeatures; ++c)
      if (!feature_enabled(set, c)) {
        CHECK(x.inliers.col(c).isZero());
        CHECK(x.neighbors.col(c).isZero());
      }
  }
  CHECK(feature_enabled(FeatureSet::xyz, 5));
  CHECK_FALSE(feature_enabled(FeatureSet::xyz, 6));
  CHECK(feature_enabled(FeatureSet::xyz_rgb, 8));
  CHECK_FALSE(feature_enabled(FeatureSet::xyz_rgb, 9));
  CHECK(parse_feature_set("xyz-rgb") == FeatureSet::xyz_rgb);
  CHECK_THROWS_AS(parse_feature_set("rgb"), ParameterError);

  const auto raw = assemble_inputs<double>(f, in, nb, {FeatureSet::full, false});
  for (int r = 0; r < 3; ++r) CHECK(raw.inliers.row(r) == f.rows.row(in[static_cast<std::size_t>(r)]));
}
