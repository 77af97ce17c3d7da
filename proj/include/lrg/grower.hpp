#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "lrg/network.hpp"
#include "lrg/region.hpp"
#include "lrg/rng.hpp"
#include "lrg/scene.hpp"

namespace lrg {

// Anything that maps (inlier rows, neighbor rows) to remove/add probabilities.
// predict() must be safe to call concurrently.
class MaskPredictor {
 public:
  virtual ~MaskPredictor() = default;
  virtual std::size_t inlier_count() const = 0;
  virtual std::size_t neighbor_count() const = 0;
  virtual InputOptions input_options() const = 0;
  virtual MaskPrediction<float> predict(const NetworkInputs<float>& inputs) const = 0;
};

class NetworkPredictor final : public MaskPredictor {
 public:
  explicit NetworkPredictor(Model model);

  std::size_t inlier_count() const override { return model_.config.inlier_count; }
  std::size_t neighbor_count() const override { return model_.config.neighbor_count; }
  InputOptions input_options() const override { return model_.config.input; }
  MaskPrediction<float> predict(const NetworkInputs<float>& inputs) const override;

  const Model& model() const { return model_; }

 private:
  Model model_;
  Network<float> net_;
};

enum class Policy { greedy, stochastic };
enum class SeedSelection { min_curvature, random };

struct GrowConfig {
  int min_segment = 10;
  int max_steps = 500;
  bool use_remove_mask = true;
  SeedSelection seed_selection = SeedSelection::min_curvature;
};

enum class Termination { none, no_neighbors, add_empty, stagnant, step_cap };
std::string_view to_string(Termination t);

struct GrowStep {
  std::vector<PointIndex> added;
  std::vector<PointIndex> removed;
  double step_loglik = 0.0;
  Termination termination = Termination::none;
  std::size_t neighbor_candidates = 0;  // distinct sampled neighbor points
  std::size_t inlier_candidates = 0;    // distinct sampled inlier points
};

// Unlabeled point of minimum curvature, lowest index on ties.
PointIndex select_seed(std::span<const double> curvature, const InstanceLabels& labels);

// One application of the learned step to `state` (in place). On `add_empty` the
// region is left unchanged; on `stagnant` and `step_cap` the update was applied.
GrowStep grow_step(const Scene& scene, const MaskPredictor& predictor, RegionState& state, Policy policy, Rng& rng,
                   const GrowConfig& cfg);

struct GrowResult {
  std::vector<PointIndex> members;  // ascending
  double loglik = 0.0;
  int steps = 0;
  Termination termination = Termination::none;
  std::size_t added = 0;
  std::size_t removed = 0;
  double add_fraction_sum = 0.0;     // sum over steps of |added| / distinct neighbor slots
  double remove_fraction_sum = 0.0;  // sum over steps of |removed| / distinct inlier slots
};

GrowResult grow_region(const Scene& scene, const InstanceLabels& labels, const MaskPredictor& predictor, PointIndex seed,
                       Policy policy, Rng& rng, const GrowConfig& cfg);

// Points of segments smaller than `min_segment` take the label of their nearest
// point in a surviving segment; surviving ids are renumbered 1..M in ascending order.
// With no surviving segment, the largest one (lowest id on ties) survives.
InstanceLabels reassign_small_segments(const PointCloud& cloud, const InstanceLabels& labels, int min_segment = 10);

struct SegmentStats {
  std::size_t regions = 0;        // grown regions (including undersized ones)
  std::size_t small_regions = 0;  // regions below min_segment
  std::size_t instances = 0;
  long steps = 0;                 // grow steps across all rollouts
  std::size_t step_cap_hits = 0;
  double mean_add_fraction = 0.0;
  double mean_remove_fraction = 0.0;

  double steps_per_region() const { return regions ? static_cast<double>(steps) / static_cast<double>(regions) : 0.0; }
};

struct SegmentResult {
  InstanceLabels labels;
  SegmentStats stats;
};

struct SearchConfig;

SegmentResult segment_scene(const Scene& scene, const MaskPredictor& predictor, const GrowConfig& grow,
                            const SearchConfig& search);

}  // namespace lrg
