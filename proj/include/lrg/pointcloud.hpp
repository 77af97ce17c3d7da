#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace lrg {

using Vec3 = Eigen::Vector3d;
using Rgb = std::array<std::uint8_t, 3>;

struct Bounds {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

// Instance labels aligned with a point cloud. 0 means "not yet assigned".
struct InstanceLabels {
  static constexpr std::int32_t kUnassigned = 0;

  std::vector<std::int32_t> ids;

  InstanceLabels() = default;
  explicit InstanceLabels(std::size_t n, std::int32_t fill = kUnassigned) : ids(n, fill) {}
  explicit InstanceLabels(std::vector<std::int32_t> v) : ids(std::move(v)) {}

  std::size_t size() const { return ids.size(); }
  std::int32_t operator[](std::size_t i) const { return ids[i]; }
  std::int32_t& operator[](std::size_t i) { return ids[i]; }

  bool complete() const;
  // Complete, and the set of ids is exactly 1..max_id() with every id used.
  bool contiguous() const;
  std::int32_t max_id() const;

  bool operator==(const InstanceLabels&) const = default;
};

// One scanned scene ("room"). Treated as immutable once built.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::vector<Vec3> positions, std::vector<Rgb> colors,
             std::optional<std::vector<std::int32_t>> gt_instance = std::nullopt);

  std::size_t size() const { return positions_.size(); }
  const std::vector<Vec3>& positions() const { return positions_; }
  const std::vector<Rgb>& colors() const { return colors_; }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  const Rgb& color(std::size_t i) const { return colors_[i]; }

  bool has_labels() const { return gt_.has_value(); }
  const std::vector<std::int32_t>& gt_instance() const;
  InstanceLabels gt_labels() const { return InstanceLabels(gt_instance()); }

  const Bounds& bounds() const { return bounds_; }

  bool operator==(const PointCloud& o) const {
    return positions_ == o.positions_ && colors_ == o.colors_ && gt_ == o.gt_;
  }

 private:
  std::vector<Vec3> positions_;
  std::vector<Rgb> colors_;
  std::optional<std::vector<std::int32_t>> gt_;
  Bounds bounds_;
};

// Text scene format: `x y z r g b [instance_id]` per line, `#` comment lines.
PointCloud load_scene(const std::filesystem::path& path);
void save_scene(const PointCloud& cloud, const std::filesystem::path& path);

// One integer per line, aligned with the scene's point order.
InstanceLabels load_labels(const std::filesystem::path& path);
void save_labels(const InstanceLabels& labels, const std::filesystem::path& path);

Rgb palette_color(std::int32_t instance_id);
void export_colored_ply(const PointCloud& cloud, const InstanceLabels& labels, const std::filesystem::path& path);

}  // namespace lrg
