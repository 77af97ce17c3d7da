#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lrg/pointcloud.hpp"

namespace lrg {

enum class Shape { box, cylinder, sphere };

struct RoomConfig {
  Vec3 extent{4.0, 4.0, 2.5};
  double spacing = 0.03;
  int min_objects = 5;
  int max_objects = 15;
  bool boxes = true;
  bool cylinders = true;
  bool spheres = true;
  double color_noise = 6.0;  // sigma, in 0..255 units
  // Object dimensions (box side, cylinder/sphere radius, height) drawn uniformly.
  double min_size = 0.15;
  double max_size = 0.45;
  double min_height = 0.2;
  double max_height = 1.0;

  void validate() const;
};

// Floor (instance 1), walls x=0, x=X, y=0, y=Y (2..5), then one instance per
// placed object. Objects sit spacing/2 above the floor, their footprints keep
// 3*spacing from each other and spacing from the walls; floor points under a
// footprint are dropped.
PointCloud generate_room(const RoomConfig& cfg, std::uint64_t seed);

struct SplitScene {
  std::uint64_t seed;
  PointCloud cloud;
};

struct Split {
  std::vector<SplitScene> train;
  std::vector<SplitScene> test;
};

inline constexpr std::uint64_t kTestSeedOffset = 1'000'000;

// Train rooms use seeds base+i, test rooms base+kTestSeedOffset+i.
Split generate_split(const RoomConfig& cfg, int n_train, int n_test, std::uint64_t base_seed);

// dir/train/room_NNNN.txt, dir/test/room_NNNN.txt and dir/manifest.txt.
void write_split(const Split& split, const RoomConfig& cfg, std::uint64_t base_seed, const std::filesystem::path& dir);

// Scene files listed in a manifest for one split ("train" or "test"), in order.
std::vector<std::filesystem::path> manifest_scenes(const std::filesystem::path& dir, const std::string& split);

}  // namespace lrg
