#include "lrg/pipeline.hpp"

#include <sstream>

#include "lrg/error.hpp"

namespace lrg {

TrainResult train_on_scenes(std::span<const PointCloud> train, const SimulationConfig& sim, const TrainConfig& tc,
                            std::uint64_t seed, const std::filesystem::path& dataset_path, const Log& log) {
  DatasetHeader h;
  h.inlier_count = static_cast<std::uint32_t>(sim.inlier_count);
  h.neighbor_count = static_cast<std::uint32_t>(sim.neighbor_count);
  h.feature_set = sim.input.feature_set;
  h.normalized = sim.input.normalize;
  {
    DatasetWriter w(dataset_path, h);
    const auto stats = generate_dataset(train, sim, seed, w);
    w.close();
    if (log) log("simulated " + std::to_string(stats.samples) + " samples from " + std::to_string(stats.instances) +
                 " instances");
  }
  const DatasetReader reader(dataset_path);
  return lrg::train(reader, tc);
}

std::vector<SceneMetrics> segment_and_score(std::span<const Scene> scenes, const MaskPredictor& predictor,
                                            const GrowConfig& grow, const SearchConfig& search,
                                            const std::vector<std::string>& names) {
  std::vector<SceneMetrics> out;
  out.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto res = segment_scene(scenes[i], predictor, grow, search);
    const std::string name = i < names.size() ? names[i] : "scene_" + std::to_string(i);
    out.push_back(evaluate_scene(scenes[i].cloud.gt_labels(), res.labels, name, res.stats.steps_per_region()));
  }
  return out;
}

std::string AblationVariant::model_key() const {
  std::ostringstream s;
  s << to_string(input.feature_set) << '/' << (input.normalize ? "norm" : "raw") << '/' << inlier_count << 'x'
    << neighbor_count;
  return s.str();
}

std::vector<AblationVariant> ablation_variants(std::uint32_t base_ij, std::uint32_t reduced_ij) {
  std::vector<AblationVariant> v;
  AblationVariant full{"full", {}, base_ij, base_ij};
  v.push_back(full);
  auto with = [&](std::string name, auto tweak) {
    AblationVariant x = full;
    x.name = std::move(name);
    tweak(x);
    v.push_back(x);
  };
  with("only-xyz", [](AblationVariant& x) { x.input.feature_set = FeatureSet::xyz; });
  with("only-xyz-rgb", [](AblationVariant& x) { x.input.feature_set = FeatureSet::xyz_rgb; });
  with("ij-" + std::to_string(reduced_ij), [&](AblationVariant& x) { x.inlier_count = x.neighbor_count = reduced_ij; });
  with("no-remove-mask", [](AblationVariant& x) { x.use_remove_mask = false; });
  with("random-seeding", [](AblationVariant& x) { x.seeding = SeedSelection::random; });
  with("no-normalization", [](AblationVariant& x) { x.input.normalize = false; });
  return v;
}

AblationVariant find_variant(std::span<const AblationVariant> all, const std::string& name) {
  for (const auto& v : all)
    if (v.name == name) return v;
  std::string known;
  for (const auto& v : all) known += (known.empty() ? "" : ", ") + v.name;
  throw ParameterError("unknown ablation variant '" + name + "' (" + known + ")");
}

AblationResult run_ablation(std::span<const PointCloud> train, std::span<const Scene> test, const AblationConfig& cfg,
                            std::span<const AblationVariant> variants, const Log& log) {
  namespace fs = std::filesystem;
  if (!cfg.work_dir.empty()) fs::create_directories(cfg.work_dir);
  AblationResult result;
  for (const auto& v : variants) {
    const std::string key = v.model_key();
    if (!result.models.count(key)) {
      SimulationConfig sim = cfg.sim;
      sim.inlier_count = v.inlier_count;
      sim.neighbor_count = v.neighbor_count;
      sim.input = v.input;
      TrainConfig tc = cfg.train;
      tc.inlier_count = v.inlier_count;
      tc.neighbor_count = v.neighbor_count;
      std::string file = key;
      for (auto& c : file)
        if (c == '/') c = '_';
      tc.checkpoint = cfg.work_dir / (file + ".lrgm");
      if (log) log("training model " + key);
      auto tr = train_on_scenes(train, sim, tc, cfg.seed, cfg.work_dir / (file + ".lrgd"), log);
      result.models.emplace(key, std::move(tr.model));
    }
    const NetworkPredictor predictor(result.models.at(key));
    GrowConfig grow = cfg.grow;
    grow.use_remove_mask = v.use_remove_mask;
    grow.seed_selection = v.seeding;
    AblationRow row;
    row.variant = v;
    row.scenes = segment_and_score(test, predictor, grow, cfg.search);
    row.summary = per_room_average(row.scenes);
    if (log) log("variant " + v.name + ": ARI " + std::to_string(row.summary.mean.ari));
    result.rows.push_back(std::move(row));
  }
  return result;
}

void write_ablation_csv(std::ostream& os, std::span<const AblationRow> rows) {
  const auto old = os.precision(10);
  os << "variant,NMI,AMI,ARI,PRC,RCL,mIOU,steps,NMI_std,AMI_std,ARI_std,PRC_std,RCL_std,mIOU_std,steps_std\n";
  for (const auto& r : rows) {
    const auto& m = r.summary.mean;
    const auto& s = r.summary.std;
    os << r.variant.name << ',' << m.nmi << ',' << m.ami << ',' << m.ari << ',' << m.precision << ',' << m.recall << ','
       << m.miou << ',' << m.steps << ',' << s.nmi << ',' << s.ami << ',' << s.ari << ',' << s.precision << ','
       << s.recall << ',' << s.miou << ',' << s.steps << '\n';
  }
  os.precision(old);
}

}  // namespace lrg
