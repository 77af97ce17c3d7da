#include "lrg/grower.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "lrg/error.hpp"
#include "lrg/search.hpp"

namespace lrg {

NetworkPredictor::NetworkPredictor(Model model) : model_(std::move(model)), net_(model_.config.arch) {
  if (model_.params.size() != net_.num_params()) throw ContractError("model parameters do not match its architecture");
}

MaskPrediction<float> NetworkPredictor::predict(const NetworkInputs<float>& inputs) const {
  if (static_cast<std::size_t>(inputs.inliers.rows()) != inlier_count() ||
      static_cast<std::size_t>(inputs.neighbors.rows()) != neighbor_count())
    throw ContractError("network inputs do not match the model's I/J");
  return net_.forward(model_.params, inputs.inliers, inputs.neighbors);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::none: return "none";
    case Termination::no_neighbors: return "no_neighbors";
    case Termination::add_empty: return "add_empty";
    case Termination::stagnant: return "stagnant";
    case Termination::step_cap: return "step_cap";
  }
  return "none";
}

PointIndex select_seed(std::span<const double> curvature, const InstanceLabels& labels) {
  if (curvature.size() != labels.size()) throw ContractError("select_seed: curvature/labels length mismatch");
  std::size_t best = curvature.size();
  for (std::size_t i = 0; i < curvature.size(); ++i) {
    if (labels[i] != InstanceLabels::kUnassigned) continue;
    if (best == curvature.size() || curvature[i] < curvature[best]) best = i;
  }
  if (best == curvature.size()) throw ContractError("select_seed: no unlabeled point left");
  return static_cast<PointIndex>(best);
}

namespace {

struct Vote {
  PointIndex point;
  bool bit;
};

// Distinct points of `votes` (sorted in place) for which the vote count passes `keep`.
template <typename Keep>
std::vector<PointIndex> tally(std::vector<Vote>& votes, std::size_t& distinct, Keep keep) {
  std::sort(votes.begin(), votes.end(), [](const Vote& a, const Vote& b) { return a.point < b.point; });
  std::vector<PointIndex> out;
  distinct = 0;
  for (std::size_t i = 0; i < votes.size();) {
    std::size_t j = i, yes = 0;
    while (j < votes.size() && votes[j].point == votes[i].point) yes += votes[j++].bit ? 1 : 0;
    ++distinct;
    if (keep(votes[i].point, yes, j - i)) out.push_back(votes[i].point);
    i = j;
  }
  return out;
}

}  // namespace

GrowStep grow_step(const Scene& scene, const MaskPredictor& predictor, RegionState& state, Policy policy, Rng& rng,
                   const GrowConfig& cfg) {
  GrowStep out;
  ++state.step;
  if (state.region.frontier().empty()) {
    out.termination = Termination::no_neighbors;
    return out;
  }
  const auto inliers = sample_fixed(state.region.members(), predictor.inlier_count(), rng);
  const auto neighbors = sample_fixed(state.region.frontier(), predictor.neighbor_count(), rng);
  const auto inputs = assemble_inputs<float>(scene.features, inliers, neighbors, predictor.input_options());
  const auto pred = predictor.predict(inputs);

  double loglik = 0.0;
  auto decide = [&](float prob) {
    const double p = std::clamp(static_cast<double>(prob), kProbClampLow, kProbClampHigh);
    const bool bit = policy == Policy::greedy ? p > 0.5 : rng.bernoulli(p);
    if (policy == Policy::stochastic) loglik += bit ? std::log(p) : std::log1p(-p);
    return bit;
  };

  std::vector<Vote> remove_votes, add_votes;
  remove_votes.reserve(inliers.size());
  add_votes.reserve(neighbors.size());
  for (std::size_t i = 0; i < inliers.size(); ++i)
    remove_votes.push_back({inliers[i], cfg.use_remove_mask ? decide(pred.remove_prob[static_cast<Eigen::Index>(i)]) : false});
  for (std::size_t j = 0; j < neighbors.size(); ++j)
    add_votes.push_back({neighbors[j], decide(pred.add_prob[static_cast<Eigen::Index>(j)])});

  const PointIndex seed = state.seed;
  out.removed = tally(remove_votes, out.inlier_candidates,
                      [&](PointIndex p, std::size_t yes, std::size_t slots) { return p != seed && 2 * yes >= slots && yes > 0; });
  out.added = tally(add_votes, out.neighbor_candidates, [](PointIndex, std::size_t yes, std::size_t) { return yes > 0; });
  out.step_loglik = loglik;
  state.loglik += loglik;

  if (out.added.empty()) {
    out.removed.clear();
    out.termination = Termination::add_empty;
    return out;
  }
  const std::size_t before = state.region.size();
  for (auto p : out.removed) state.region.remove(p);
  for (auto p : out.added) state.region.add(p);
  state.stagnant_steps = state.region.size() <= before ? state.stagnant_steps + 1 : 0;
  if (state.stagnant_steps >= 2)
    out.termination = Termination::stagnant;
  else if (state.step >= cfg.max_steps)
    out.termination = Termination::step_cap;
  return out;
}

GrowResult grow_region(const Scene& scene, const InstanceLabels& labels, const MaskPredictor& predictor, PointIndex seed,
                       Policy policy, Rng& rng, const GrowConfig& cfg) {
  if (labels[seed] != InstanceLabels::kUnassigned) throw ContractError("grow_region: seed point is already labeled");
  RegionState state(scene.graph, labels, seed);
  GrowResult r;
  for (;;) {
    const GrowStep s = grow_step(scene, predictor, state, policy, rng, cfg);
    r.added += s.added.size();
    r.removed += s.removed.size();
    if (s.neighbor_candidates) r.add_fraction_sum += static_cast<double>(s.added.size()) / s.neighbor_candidates;
    if (s.inlier_candidates) r.remove_fraction_sum += static_cast<double>(s.removed.size()) / s.inlier_candidates;
    if (s.termination != Termination::none) {
      r.termination = s.termination;
      break;
    }
  }
  r.loglik = state.loglik;
  r.steps = state.step;
  r.members = state.region.sorted_members();
  return r;
}

InstanceLabels reassign_small_segments(const PointCloud& cloud, const InstanceLabels& labels, int min_segment) {
  if (labels.size() != cloud.size()) throw ContractError("reassign_small_segments: labels/cloud length mismatch");
  if (!labels.complete()) throw ContractError("reassign_small_segments: labels contain unassigned points");
  std::map<std::int32_t, std::size_t> count;
  for (auto v : labels.ids) ++count[v];

  std::map<std::int32_t, std::int32_t> renumber;
  for (const auto& [id, n] : count)
    if (n >= static_cast<std::size_t>(min_segment)) renumber[id] = 0;
  if (renumber.empty()) {
    std::int32_t best = count.begin()->first;
    for (const auto& [id, n] : count)
      if (n > count[best]) best = id;
    renumber[best] = 0;
  }
  std::int32_t next = 1;
  for (auto& [id, v] : renumber) v = next++;

  InstanceLabels out(labels.size());
  std::vector<Vec3> surv_pos;
  std::vector<std::int32_t> surv_label;
  bool any_small = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = renumber.find(labels[i]);
    if (it == renumber.end()) {
      any_small = true;
      continue;
    }
    out[i] = it->second;
    surv_pos.push_back(cloud.position(i));
    surv_label.push_back(it->second);
  }
  if (!any_small) return out;

  Vec3 lo = surv_pos.front(), hi = surv_pos.front();
  for (const auto& p : surv_pos) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double cell = std::max((hi - lo).maxCoeff() / std::cbrt(static_cast<double>(surv_pos.size())), 1e-4);
  const SpatialIndex index(surv_pos, cell);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (out[i] != InstanceLabels::kUnassigned) continue;
    const auto nn = index.knn(cloud.position(i), 1);
    out[i] = surv_label[nn.front()];
  }
  return out;
}

SegmentResult segment_scene(const Scene& scene, const MaskPredictor& predictor, const GrowConfig& grow,
                            const SearchConfig& search) {
  search.validate();
  const std::size_t n = scene.size();
  InstanceLabels labels(n);
  Rng rng(search.seed);

  std::vector<PointIndex> order(n);
  std::iota(order.begin(), order.end(), PointIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](PointIndex a, PointIndex b) { return scene.features.curvature(a) < scene.features.curvature(b); });
  std::size_t cursor = 0;
  IndexedSet unlabeled(n);
  for (PointIndex p = 0; p < n; ++p) unlabeled.insert(p);

  SegmentResult res;
  auto& st = res.stats;
  double add_frac = 0.0, remove_frac = 0.0;
  long forward_steps = 0;
  std::int32_t next_id = 1;

  while (!unlabeled.empty()) {
    PointIndex seed;
    if (grow.seed_selection == SeedSelection::min_curvature) {
      while (labels[order[cursor]] != InstanceLabels::kUnassigned) ++cursor;
      seed = order[cursor];
    } else {
      seed = unlabeled.items()[rng.index(unlabeled.size())];
    }
    const SearchResult sr = run_search(scene, labels, predictor, seed, grow, search, rng);
    for (auto p : sr.members) {
      labels[p] = next_id;
      unlabeled.erase(p);
    }
    ++next_id;
    ++st.regions;
    if (sr.members.size() < static_cast<std::size_t>(grow.min_segment)) ++st.small_regions;
    st.steps += sr.steps;
    if (sr.winner.termination == Termination::step_cap) ++st.step_cap_hits;
    add_frac += sr.winner.add_fraction_sum;
    remove_frac += sr.winner.remove_fraction_sum;
    forward_steps += sr.winner.steps;
  }
  res.labels = reassign_small_segments(scene.cloud, labels, grow.min_segment);
  st.instances = static_cast<std::size_t>(res.labels.max_id());
  if (forward_steps > 0) {
    st.mean_add_fraction = add_frac / static_cast<double>(forward_steps);
    st.mean_remove_fraction = remove_frac / static_cast<double>(forward_steps);
  }
  return res;
}

}  // namespace lrg
