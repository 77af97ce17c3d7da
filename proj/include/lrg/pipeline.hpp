#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lrg/grower.hpp"
#include "lrg/metrics.hpp"
#include "lrg/search.hpp"
#include "lrg/simulator.hpp"
#include "lrg/trainer.hpp"

namespace lrg {

using Log = std::function<void(const std::string&)>;

// Simulate a dataset from `train` into `dataset_path`, then train on it.
TrainResult train_on_scenes(std::span<const PointCloud> train, const SimulationConfig& sim, const TrainConfig& tc,
                            std::uint64_t seed, const std::filesystem::path& dataset_path, const Log& log = {});

// Segment every scene and score it against its ground truth.
std::vector<SceneMetrics> segment_and_score(std::span<const Scene> scenes, const MaskPredictor& predictor,
                                            const GrowConfig& grow, const SearchConfig& search,
                                            const std::vector<std::string>& names = {});

// One row of the ablation table. Variants that share (input options, I, J) share a model.
struct AblationVariant {
  std::string name;
  InputOptions input;
  std::uint32_t inlier_count = 128;
  std::uint32_t neighbor_count = 128;
  bool use_remove_mask = true;
  SeedSelection seeding = SeedSelection::min_curvature;

  std::string model_key() const;
};

// full, only XYZ, only XYZ+RGB, I=J=reduced, no remove mask, random seeding, no normalization.
std::vector<AblationVariant> ablation_variants(std::uint32_t base_ij = 128, std::uint32_t reduced_ij = 32);
// Lookup by name, or throw ParameterError.
AblationVariant find_variant(std::span<const AblationVariant> all, const std::string& name);

struct AblationConfig {
  SimulationConfig sim;
  TrainConfig train;
  GrowConfig grow;
  SearchConfig search;
  std::uint64_t seed = 0;
  std::filesystem::path work_dir;  // simulated datasets and checkpoints go here
};

struct AblationRow {
  AblationVariant variant;
  std::vector<SceneMetrics> scenes;
  MetricsSummary summary;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::map<std::string, Model> models;  // by model_key()
};

AblationResult run_ablation(std::span<const PointCloud> train, std::span<const Scene> test, const AblationConfig& cfg,
                            std::span<const AblationVariant> variants, const Log& log = {});

// name,NMI,AMI,ARI,PRC,RCL,mIOU,steps with mean values, then std columns.
void write_ablation_csv(std::ostream& os, std::span<const AblationRow> rows);

}  // namespace lrg
