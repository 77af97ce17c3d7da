#include "lrg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <tuple>

#include "lrg/error.hpp"

namespace lrg {

bool Contingency::identical_partition() const {
  return cells.size() == gt_sums.size() && cells.size() == pred_sums.size();
}

Contingency build_contingency(const InstanceLabels& gt, const InstanceLabels& pred) {
  if (gt.size() != pred.size()) throw ContractError("contingency: label vectors differ in length");
  if (!gt.complete() || !pred.complete()) throw ContractError("contingency: labels must be complete");
  Contingency c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    ++c.cells[{gt[i], pred[i]}];
    ++c.gt_sums[gt[i]];
    ++c.pred_sums[pred[i]];
  }
  c.n = static_cast<std::int64_t>(gt.size());
  return c;
}

namespace {

double entropy(const std::map<std::int32_t, std::int64_t>& sums, std::int64_t n) {
  double h = 0.0;
  const double dn = static_cast<double>(n);
  for (const auto& [id, a] : sums) {
    const double p = static_cast<double>(a) / dn;
    h -= p * std::log(p);
  }
  return h;
}

void require_defined(const Contingency& c) {
  if (c.n < 2) throw MetricError("clustering metrics need at least two points");
}

double choose2(std::int64_t k) { return 0.5 * static_cast<double>(k) * static_cast<double>(k - 1); }

}  // namespace

double entropy_gt(const Contingency& c) { return entropy(c.gt_sums, c.n); }
double entropy_pred(const Contingency& c) { return entropy(c.pred_sums, c.n); }

double mutual_information(const Contingency& c) {
  const double n = static_cast<double>(c.n);
  double mi = 0.0;
  for (const auto& [key, nij] : c.cells) {
    const double a = static_cast<double>(c.gt_sums.at(key.first));
    const double b = static_cast<double>(c.pred_sums.at(key.second));
    const double v = static_cast<double>(nij);
    mi += v / n * std::log(n * v / (a * b));
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(const Contingency& c) {
  const std::int64_t n = c.n;
  const double dn = static_cast<double>(n);
  const double lg_n = std::lgamma(dn + 1.0);
  double emi = 0.0;
  for (const auto& [gi, a] : c.gt_sums) {
    for (const auto& [pj, b] : c.pred_sums) {
      const double da = static_cast<double>(a), db = static_cast<double>(b);
      const double fixed = std::lgamma(da + 1) + std::lgamma(db + 1) + std::lgamma(dn - da + 1) +
                           std::lgamma(dn - db + 1) - lg_n;
      const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
      const std::int64_t hi = std::min(a, b);
      for (std::int64_t k = lo; k <= hi; ++k) {
        const double dk = static_cast<double>(k);
        const double log_p = fixed - std::lgamma(dk + 1) - std::lgamma(da - dk + 1) - std::lgamma(db - dk + 1) -
                             std::lgamma(dn - da - db + dk + 1);
        emi += dk / dn * std::log(dn * dk / (da * db)) * std::exp(log_p);
      }
    }
  }
  return emi;
}

double nmi(const Contingency& c) {
  require_defined(c);
  if (c.identical_partition()) return 1.0;
  const double hg = entropy_gt(c), hp = entropy_pred(c);
  if (hg <= 0.0 || hp <= 0.0) return 0.0;
  return std::clamp(mutual_information(c) / std::sqrt(hg * hp), 0.0, 1.0);
}

double ami(const Contingency& c) {
  require_defined(c);
  if (c.identical_partition()) return 1.0;
  const double mi = mutual_information(c);
  const double emi = expected_mutual_information(c);
  const double denom = 0.5 * (entropy_gt(c) + entropy_pred(c)) - emi;
  if (std::abs(denom) < 1e-15) return 0.0;
  return (mi - emi) / denom;
}

double ari(const Contingency& c) {
  require_defined(c);
  if (c.identical_partition()) return 1.0;
  double index = 0.0, sa = 0.0, sb = 0.0;
  for (const auto& [key, v] : c.cells) index += choose2(v);
  for (const auto& [id, a] : c.gt_sums) sa += choose2(a);
  for (const auto& [id, b] : c.pred_sums) sb += choose2(b);
  const double expected = sa * sb / choose2(c.n);
  const double max_index = 0.5 * (sa + sb);
  if (max_index == expected) return 0.0;
  return (index - expected) / (max_index - expected);
}

DetectionScore match_and_score(const InstanceLabels& gt, const InstanceLabels& pred, double iou_threshold) {
  const Contingency c = build_contingency(gt, pred);
  struct Pair {
    double iou;
    std::int32_t g, p;
  };
  std::vector<Pair> pairs;
  pairs.reserve(c.cells.size());
  for (const auto& [key, inter] : c.cells) {
    const double uni = static_cast<double>(c.gt_sums.at(key.first) + c.pred_sums.at(key.second) - inter);
    pairs.push_back({static_cast<double>(inter) / uni, key.first, key.second});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(y.iou, x.g, x.p) < std::tie(x.iou, y.g, y.p);
  });
  std::map<std::int32_t, bool> gt_used, pred_used;
  DetectionScore s;
  s.gt_segments = c.gt_sums.size();
  s.pred_segments = c.pred_sums.size();
  double iou_sum = 0.0;
  for (const auto& pr : pairs) {
    if (gt_used[pr.g] || pred_used[pr.p]) continue;
    gt_used[pr.g] = pred_used[pr.p] = true;
    iou_sum += pr.iou;
    if (pr.iou > iou_threshold) ++s.true_positives;
  }
  s.precision = static_cast<double>(s.true_positives) / static_cast<double>(s.pred_segments);
  s.recall = static_cast<double>(s.true_positives) / static_cast<double>(s.gt_segments);
  s.miou = iou_sum / static_cast<double>(s.gt_segments);
  return s;
}

SceneMetrics evaluate_scene(const InstanceLabels& gt, const InstanceLabels& pred, std::string name, double steps) {
  const Contingency c = build_contingency(gt, pred);
  const DetectionScore d = match_and_score(gt, pred);
  SceneMetrics m;
  m.scene = std::move(name);
  m.nmi = nmi(c);
  m.ami = ami(c);
  m.ari = ari(c);
  m.precision = d.precision;
  m.recall = d.recall;
  m.miou = d.miou;
  m.steps = steps;
  return m;
}

namespace {

constexpr double SceneMetrics::*kFields[] = {&SceneMetrics::nmi,       &SceneMetrics::ami,    &SceneMetrics::ari,
                                             &SceneMetrics::precision, &SceneMetrics::recall, &SceneMetrics::miou,
                                             &SceneMetrics::steps};

void write_row(std::ostream& os, const SceneMetrics& m) {
  os << m.scene;
  for (auto f : kFields) os << ',' << m.*f;
  os << '\n';
}

}  // namespace

MetricsSummary per_room_average(std::span<const SceneMetrics> scenes) {
  if (scenes.empty()) throw ContractError("per_room_average: no scenes");
  MetricsSummary s;
  s.scenes = scenes.size();
  s.mean.scene = "mean";
  s.std.scene = "std";
  const double n = static_cast<double>(scenes.size());
  for (auto f : kFields) {
    double sum = 0.0;
    for (const auto& m : scenes) sum += m.*f;
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& m : scenes) var += (m.*f - mean) * (m.*f - mean);
    s.mean.*f = mean;
    s.std.*f = std::sqrt(var / n);
  }
  return s;
}

void write_metrics_csv(std::ostream& os, std::span<const SceneMetrics> scenes) {
  const auto old = os.precision(10);
  os << "scene,NMI,AMI,ARI,PRC,RCL,mIOU,steps\n";
  for (const auto& m : scenes) write_row(os, m);
  if (!scenes.empty()) {
    const auto s = per_room_average(scenes);
    write_row(os, s.mean);
    write_row(os, s.std);
  }
  os.precision(old);
}

}  // namespace lrg
