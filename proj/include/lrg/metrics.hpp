#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrg/pointcloud.hpp"

namespace lrg {

struct Contingency {
  std::map<std::pair<std::int32_t, std::int32_t>, std::int64_t> cells;  // (gt, pred) -> count
  std::map<std::int32_t, std::int64_t> gt_sums;
  std::map<std::int32_t, std::int64_t> pred_sums;
  std::int64_t n = 0;

  // Both labelings induce the same partition.
  bool identical_partition() const;
};

Contingency build_contingency(const InstanceLabels& gt, const InstanceLabels& pred);

// Natural-log entropies and mutual information of the joint counts.
double entropy_gt(const Contingency& c);
double entropy_pred(const Contingency& c);
double mutual_information(const Contingency& c);
// Expected MI under the hypergeometric null with the observed marginals.
double expected_mutual_information(const Contingency& c);

// All three throw MetricError when n < 2.
double nmi(const Contingency& c);  // MI / sqrt(H_gt H_pred)
double ami(const Contingency& c);  // (MI - EMI) / (mean(H_gt, H_pred) - EMI)
double ari(const Contingency& c);

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double miou = 0.0;
  std::size_t true_positives = 0;
  std::size_t gt_segments = 0;
  std::size_t pred_segments = 0;
};

// Greedy one-to-one matching on IOU (descending, ties by gt id then pred id);
// a matched pair with IOU > threshold counts as a true positive.
DetectionScore match_and_score(const InstanceLabels& gt, const InstanceLabels& pred, double iou_threshold = 0.5);

struct SceneMetrics {
  std::string scene;
  double nmi = 0.0, ami = 0.0, ari = 0.0;
  double precision = 0.0, recall = 0.0, miou = 0.0;
  double steps = 0.0;
};

SceneMetrics evaluate_scene(const InstanceLabels& gt, const InstanceLabels& pred, std::string name = {}, double steps = 0.0);

struct MetricsSummary {
  SceneMetrics mean;
  SceneMetrics std;  // population standard deviation
  std::size_t scenes = 0;
};

MetricsSummary per_room_average(std::span<const SceneMetrics> scenes);

// Header, one row per scene, then "mean" and "std" rows.
void write_metrics_csv(std::ostream& os, std::span<const SceneMetrics> scenes);

}  // namespace lrg
