#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lrg/dataset.hpp"
#include "lrg/region.hpp"
#include "lrg/rng.hpp"
#include "lrg/scene.hpp"

namespace lrg {

// Mistake probability for one simulated instance: alpha(k) = max(0, alpha0 - decay*k).
struct NoiseSchedule {
  double alpha0 = 0.0;
  double decay = 0.01;

  double at(int step) const { return std::max(0.0, alpha0 - decay * step); }
};

// Grow by every unassigned delta-neighbor that shares the seed's ground-truth instance.
RegionState oracle_next_region(const Scene& scene, const RegionState& state);

// The noisy counterpart of oracle_next_region. Wrong-instance members are dropped
// (the target remove mask), then each correct frontier point is skipped with
// probability alpha(k) and each wrong-instance frontier point joins with probability alpha(k).
RegionState corrupt_region(const Scene& scene, const RegionState& state, const NoiseSchedule& schedule, Rng& rng);

// Returns nullopt when the region has no unassigned neighbors.
std::optional<TrainingSample> make_training_sample(const Scene& scene, const RegionState& state, std::size_t inlier_count,
                                                   std::size_t neighbor_count, Rng& rng,
                                                   const InputOptions& opts = {});

// Geometry-only augmentation: optional x/y swap, then quarter turns about z, then
// translation back onto the original min corner.
PointCloud augment_scene(const PointCloud& cloud, bool swap_xy, int quarter_turns);
PointCloud augment_scene(const PointCloud& cloud, Rng& rng);

struct SimulationConfig {
  std::size_t inlier_count = 128;
  std::size_t neighbor_count = 128;
  double delta = kDefaultDelta;
  int pca_k = kDefaultPcaNeighbors;
  double alpha_min = 0.2;
  double alpha_max = 0.4;
  double decay = 0.01;
  int copies = 1;        // passes over each scene
  bool augment = true;   // randomly flip/rotate each pass
  int max_steps = 500;
  InputOptions input;
};

struct InstanceSimulation {
  std::vector<TrainingSample> samples;
  std::vector<std::size_t> region_sizes;  // |Q_k| for k = 0..steps
  int steps = 0;                          // transitions applied
  bool converged = false;                 // reached the closure with alpha at 0
};

// Points of `instance` reachable from `seed` through delta-hops inside the instance.
std::vector<PointIndex> instance_closure(const Scene& scene, PointIndex seed);

// One full simulated growth of the instance containing `seed`.
InstanceSimulation simulate_instance(const Scene& scene, PointIndex seed, const NoiseSchedule& schedule,
                                     const SimulationConfig& cfg, Rng& rng, bool emit_samples = true);

struct DatasetStats {
  std::size_t samples = 0;
  std::size_t instances = 0;
  std::size_t scenes = 0;
};

// Streams samples in (scene, pass, instance, step) order; parallel over instances.
DatasetStats generate_dataset(std::span<const PointCloud> scenes, const SimulationConfig& cfg, std::uint64_t seed,
                              DatasetWriter& out);

}  // namespace lrg
