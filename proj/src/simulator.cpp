#include "lrg/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "lrg/error.hpp"

namespace lrg {

namespace {

std::int32_t seed_instance(const Scene& scene, const RegionState& state) {
  if (!scene.cloud.has_labels()) throw ContractError("training simulation requires ground-truth instance labels");
  return scene.cloud.gt_instance()[state.seed];
}

}  // namespace

RegionState oracle_next_region(const Scene& scene, const RegionState& state) {
  const std::int32_t inst = seed_instance(scene, state);
  const auto& gt = scene.cloud.gt_instance();
  for (auto p : state.region.members())
    if (gt[p] != inst) throw ContractError("oracle_next_region: region contains points of another instance");
  RegionState next = state;
  for (auto q : state.region.frontier())
    if (gt[q] == inst) next.region.add(q);
  ++next.step;
  return next;
}

RegionState corrupt_region(const Scene& scene, const RegionState& state, const NoiseSchedule& schedule, Rng& rng) {
  const std::int32_t inst = seed_instance(scene, state);
  const auto& gt = scene.cloud.gt_instance();
  const double alpha = schedule.at(state.step);
  if (alpha < 0.0 || alpha > 1.0) throw ParameterError("mistake probability must lie in [0,1]");

  RegionState next = state;
  for (auto p : state.region.members())
    if (gt[p] != inst) next.region.remove(p);
  for (auto q : state.region.frontier()) {
    const bool hit = rng.bernoulli(alpha);
    if (gt[q] == inst) {
      if (!hit) next.region.add(q);
    } else if (hit) {
      next.region.add(q);
    }
  }
  ++next.step;
  return next;
}

std::optional<TrainingSample> make_training_sample(const Scene& scene, const RegionState& state, std::size_t inlier_count,
                                                   std::size_t neighbor_count, Rng& rng, const InputOptions& opts) {
  const std::int32_t inst = seed_instance(scene, state);
  if (state.region.frontier().empty()) return std::nullopt;
  const auto& gt = scene.cloud.gt_instance();
  const auto inliers = sample_fixed(state.region.members(), inlier_count, rng);
  const auto neighbors = sample_fixed(state.region.frontier(), neighbor_count, rng);
  auto in = assemble_inputs<float>(scene.features, inliers, neighbors, opts);

  TrainingSample s;
  s.inliers = std::move(in.inliers);
  s.neighbors = std::move(in.neighbors);
  s.remove_target.resize(inlier_count);
  s.add_target.resize(neighbor_count);
  for (std::size_t i = 0; i < inlier_count; ++i) s.remove_target[i] = gt[inliers[i]] != inst ? 1 : 0;
  for (std::size_t j = 0; j < neighbor_count; ++j) s.add_target[j] = gt[neighbors[j]] == inst ? 1 : 0;
  s.meta.instance = inst;
  s.meta.step = static_cast<std::uint32_t>(state.step);
  return s;
}

PointCloud augment_scene(const PointCloud& cloud, bool swap_xy, int quarter_turns) {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  std::vector<Vec3> pos = cloud.positions();
  for (auto& p : pos) {
    if (swap_xy) std::swap(p.x(), p.y());
    for (int t = 0; t < turns; ++t) p = Vec3(-p.y(), p.x(), p.z());
  }
  if (swap_xy || turns != 0) {
    Vec3 lo = pos.front();
    for (const auto& p : pos) lo = lo.cwiseMin(p);
    const Vec3 shift = cloud.bounds().min - lo;
    for (auto& p : pos) p += shift;
  }
  std::optional<std::vector<std::int32_t>> gt;
  if (cloud.has_labels()) gt = cloud.gt_instance();
  return PointCloud(std::move(pos), cloud.colors(), std::move(gt));
}

PointCloud augment_scene(const PointCloud& cloud, Rng& rng) {
  const bool swap = rng.bernoulli(0.5);
  const int turns = static_cast<int>(rng.index(4));
  return augment_scene(cloud, swap, turns);
}

std::vector<PointIndex> instance_closure(const Scene& scene, PointIndex seed) {
  const auto& gt = scene.cloud.gt_instance();
  const std::int32_t inst = gt[seed];
  std::vector<char> seen(scene.size(), 0);
  std::vector<PointIndex> out{seed};
  seen[seed] = 1;
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (auto q : scene.graph.neighbors(out[head])) {
      if (!seen[q] && gt[q] == inst) {
        seen[q] = 1;
        out.push_back(q);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

InstanceSimulation simulate_instance(const Scene& scene, PointIndex seed, const NoiseSchedule& schedule,
                                     const SimulationConfig& cfg, Rng& rng, bool emit_samples) {
  if (!scene.cloud.has_labels()) throw ContractError("training simulation requires ground-truth instance labels");
  const auto closure = instance_closure(scene, seed);
  std::vector<char> in_closure(scene.size(), 0);
  for (auto p : closure) in_closure[p] = 1;

  InstanceSimulation sim;
  RegionState state(scene.graph, scene.unlabeled, seed);
  for (;;) {
    sim.region_sizes.push_back(state.region.size());
    if (emit_samples) {
      if (auto s = make_training_sample(scene, state, cfg.inlier_count, cfg.neighbor_count, rng, cfg.input))
        sim.samples.push_back(std::move(*s));
    }
    std::size_t inside = 0;
    for (auto p : state.region.members()) inside += in_closure[p];
    const bool complete = inside == closure.size() && state.region.size() == closure.size();
    if (complete && (schedule.at(state.step) <= 0.0 || state.region.frontier().empty())) {
      sim.converged = true;
      break;
    }
    if (state.step >= cfg.max_steps) break;
    state = corrupt_region(scene, state, schedule, rng);
  }
  sim.steps = state.step;
  return sim;
}

DatasetStats generate_dataset(std::span<const PointCloud> scenes, const SimulationConfig& cfg, std::uint64_t seed,
                              DatasetWriter& out) {
  if (cfg.alpha_min < 0.0 || cfg.alpha_max > 1.0 || cfg.alpha_min > cfg.alpha_max)
    throw ParameterError("alpha range must satisfy 0 <= alpha_min <= alpha_max <= 1");
  if (cfg.copies < 1) throw ParameterError("copies must be >= 1");
  DatasetStats stats;
  for (std::size_t si = 0; si < scenes.size(); ++si) {
    if (!scenes[si].has_labels()) throw ContractError("generate_dataset: scene " + std::to_string(si) + " is unlabeled");
    for (int copy = 0; copy < cfg.copies; ++copy) {
      Rng aug_rng(derive_seed(seed, {si, static_cast<std::uint64_t>(copy), 0xa11u}));
      PointCloud cloud = cfg.augment ? augment_scene(scenes[si], aug_rng) : scenes[si];
      const Scene scene = prepare_scene(std::move(cloud), cfg.delta, cfg.pca_k);
      ++stats.scenes;

      std::map<std::int32_t, std::vector<PointIndex>> members;
      const auto& gt = scene.cloud.gt_instance();
      for (std::size_t p = 0; p < gt.size(); ++p) members[gt[p]].push_back(static_cast<PointIndex>(p));
      std::vector<std::int32_t> ids;
      for (const auto& [id, _] : members) ids.push_back(id);

      std::vector<std::vector<TrainingSample>> per_instance(ids.size());
      const auto n_inst = static_cast<std::ptrdiff_t>(ids.size());
#pragma omp parallel for schedule(dynamic, 1)
      for (std::ptrdiff_t k = 0; k < n_inst; ++k) {
        const auto id = ids[static_cast<std::size_t>(k)];
        Rng rng(derive_seed(seed, {si, static_cast<std::uint64_t>(copy), static_cast<std::uint64_t>(id)}));
        const auto& pts = members.at(id);
        const PointIndex start = pts[rng.index(pts.size())];
        const NoiseSchedule schedule{rng.uniform(cfg.alpha_min, cfg.alpha_max), cfg.decay};
        auto sim = simulate_instance(scene, start, schedule, cfg, rng);
        for (auto& s : sim.samples) s.meta.scene = static_cast<std::uint32_t>(si);
        per_instance[static_cast<std::size_t>(k)] = std::move(sim.samples);
      }
      for (auto& v : per_instance) {
        for (const auto& s : v) out.write(s);
        stats.samples += v.size();
      }
      stats.instances += ids.size();
    }
  }
  return stats;
}

}  // namespace lrg
