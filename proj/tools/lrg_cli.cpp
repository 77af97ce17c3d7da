// lrg: synthetic data, simulation, training, segmentation and evaluation.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lrg/baselines.hpp"
#include "lrg/error.hpp"
#include "lrg/metrics.hpp"
#include "lrg/pipeline.hpp"
#include "lrg/synthgen.hpp"

namespace fs = std::filesystem;
using namespace lrg;

namespace {

// Scenes given either as files or as one split of a synth directory.
struct SceneSource {
  std::vector<std::string> files;
  std::string data_dir;
  std::string split;
};

void add_source(CLI::App* sub, SceneSource& s, const std::string& split) {
  s.split = split;
  sub->add_option("--scene", s.files, "Scene file(s)");
  sub->add_option("--data", s.data_dir, "Directory written by `synth`");
  sub->add_option("--split", s.split, "Split of --data to use (train|test)");
}

std::vector<fs::path> resolve(const SceneSource& s) {
  std::vector<fs::path> out(s.files.begin(), s.files.end());
  if (!s.data_dir.empty()) {
    auto listed = manifest_scenes(s.data_dir, s.split);
    out.insert(out.end(), listed.begin(), listed.end());
  }
  if (out.empty()) throw ParameterError("no scenes given (use --scene or --data)");
  return out;
}

fs::path feature_cache_path(const fs::path& scene) { return fs::path(scene).replace_extension(".lrgf"); }

Scene load_prepared(const fs::path& path, double delta, int pca_k, bool use_cache) {
  PointCloud cloud = load_scene(path);
  const fs::path cache = feature_cache_path(path);
  if (use_cache && fs::exists(cache)) {
    FeatureMatrix f = load_features(cache);
    if (static_cast<std::size_t>(f.rows.rows()) != cloud.size())
      throw ParameterError(cache.string() + ": feature cache does not match the scene");
    return prepare_scene(std::move(cloud), std::move(f), delta);
  }
  return prepare_scene(std::move(cloud), delta, pca_k);
}

std::vector<int> parse_widths(const std::string& s) {
  std::vector<int> w;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) w.push_back(std::stoi(tok));
  return w;
}

struct Common {
  int jobs = 0;
  bool quiet = false;
};

Log logger(const Common& c) {
  if (c.quiet) return {};
  return [](const std::string& m) { std::cerr << m << '\n'; };
}

// ---- synth ------------------------------------------------------------------
struct SynthOpts {
  std::string out;
  int n_train = 40, n_test = 20;
  std::uint64_t seed = 0;
  RoomConfig room;
  std::vector<double> extent{4.0, 4.0, 2.5};
  std::vector<int> objects{5, 15};
};

void run_synth(const SynthOpts& o, const Common& c) {
  RoomConfig cfg = o.room;
  if (o.extent.size() != 3) throw ParameterError("--extent needs three values");
  if (o.objects.size() != 2) throw ParameterError("--objects needs two values");
  cfg.extent = Vec3(o.extent[0], o.extent[1], o.extent[2]);
  cfg.min_objects = o.objects[0];
  cfg.max_objects = o.objects[1];
  const Split split = generate_split(cfg, o.n_train, o.n_test, o.seed);
  write_split(split, cfg, o.seed, o.out);
  if (auto log = logger(c))
    log("wrote " + std::to_string(split.train.size() + split.test.size()) + " scenes to " + o.out);
}

// ---- features ---------------------------------------------------------------
struct FeaturesOpts {
  SceneSource src;
  int pca_k = kDefaultPcaNeighbors;
};

void run_features(const FeaturesOpts& o, const Common& c) {
  const auto log = logger(c);
  for (const auto& p : resolve(o.src)) {
    const PointCloud cloud = load_scene(p);
    save_features(compute_features(cloud, o.pca_k), feature_cache_path(p));
    if (log) log(feature_cache_path(p).string());
  }
}

// ---- simulate -----------------------------------------------------------------
struct SimulateOpts {
  SceneSource src;
  std::string out;
  std::string scale = "desk";
  int ij = 0;
  SimulationConfig sim;
  std::string feature_set = "full";
  bool no_normalize = false;
  bool no_augment = false;
  std::uint64_t seed = 0;
};

std::size_t scale_ij(const std::string& scale) {
  if (scale == "desk") return 128;
  if (scale == "large") return 512;
  throw ParameterError("--scale must be desk or large");
}

void run_simulate(const SimulateOpts& o, const Common& c) {
  SimulationConfig sim = o.sim;
  sim.inlier_count = sim.neighbor_count = o.ij > 0 ? static_cast<std::size_t>(o.ij) : scale_ij(o.scale);
  sim.input.feature_set = parse_feature_set(o.feature_set);
  sim.input.normalize = !o.no_normalize;
  sim.augment = !o.no_augment;
  std::vector<PointCloud> clouds;
  for (const auto& p : resolve(o.src)) clouds.push_back(load_scene(p));
  DatasetHeader h;
  h.inlier_count = static_cast<std::uint32_t>(sim.inlier_count);
  h.neighbor_count = static_cast<std::uint32_t>(sim.neighbor_count);
  h.feature_set = sim.input.feature_set;
  h.normalized = sim.input.normalize;
  DatasetWriter w(o.out, h);
  const auto stats = generate_dataset(clouds, sim, o.seed, w);
  w.close();
  if (auto log = logger(c))
    log("wrote " + std::to_string(stats.samples) + " samples (" + std::to_string(stats.instances) + " instances, " +
        std::to_string(stats.scenes) + " scenes) to " + o.out);
}

// ---- train ------------------------------------------------------------------
struct TrainOpts {
  std::string data, out;
  std::string arch = "desk";
  std::string encoder, decoder;
  int skip_layer = 0;
  TrainConfig tc;
};

void run_train(const TrainOpts& o, const Common& c) {
  TrainConfig tc = o.tc;
  if (o.arch == "desk")
    tc.arch = Architecture::desk_scale();
  else if (o.arch == "large")
    tc.arch = Architecture::large_scale();
  else
    throw ParameterError("--arch must be desk or large");
  if (!o.encoder.empty()) tc.arch.encoder = parse_widths(o.encoder);
  if (!o.decoder.empty()) tc.arch.decoder = parse_widths(o.decoder);
  if (o.skip_layer > 0) tc.arch.skip_layer = o.skip_layer;
  tc.arch.validate();
  tc.checkpoint = fs::path(o.out);
  if (auto log = logger(c))
    tc.on_epoch = [log](int e, double loss) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "epoch %d loss %.6f", e + 1, loss);
      log(buf);
    };
  const DatasetReader reader(o.data);
  const auto result = train(reader, tc);
  save_model(result.model, o.out);
}

// ---- segment / baseline -------------------------------------------------------
struct SegmentOpts {
  SceneSource src;
  std::string model;
  std::string out_dir = ".";
  std::string out;
  std::string strategy = "greedy";
  std::string seeding = "min-curvature";
  std::string stats;
  bool ply = false;
  bool no_remove_mask = false;
  bool use_cache = false;
  double delta = kDefaultDelta;
  int pca_k = kDefaultPcaNeighbors;
  GrowConfig grow;
  SearchConfig search;
};

struct BaselineOpts {
  SceneSource src;
  std::string method = "threshold";
  std::string out_dir = ".";
  std::string out;
  bool ply = false;
  bool use_cache = false;
  double delta = kDefaultDelta;
  int pca_k = kDefaultPcaNeighbors;
  ThresholdConfig threshold;
  SmoothnessConfig smooth;
  int min_segment = 10;
};

fs::path labels_target(const std::string& out, const std::string& out_dir, const fs::path& scene, std::size_t count) {
  if (!out.empty()) {
    if (count != 1) throw ParameterError("--out only works with a single scene; use --out-dir");
    return out;
  }
  return fs::path(out_dir) / (scene.stem().string() + ".labels");
}

void write_labels(const PointCloud& cloud, const InstanceLabels& labels, const fs::path& target, bool ply) {
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  save_labels(labels, target);
  if (ply) export_colored_ply(cloud, labels, fs::path(target).replace_extension(".ply"));
}

void run_segment(const SegmentOpts& o, const Common& c) {
  const NetworkPredictor predictor(load_model(o.model));
  GrowConfig grow = o.grow;
  grow.use_remove_mask = !o.no_remove_mask;
  if (o.seeding == "min-curvature")
    grow.seed_selection = SeedSelection::min_curvature;
  else if (o.seeding == "random")
    grow.seed_selection = SeedSelection::random;
  else
    throw ParameterError("--seeding must be min-curvature or random");
  SearchConfig search = o.search;
  search.strategy = parse_strategy(o.strategy);
  search.validate();

  const auto scenes = resolve(o.src);
  std::ofstream stats;
  if (!o.stats.empty()) {
    stats.open(o.stats);
    if (!stats) throw IoError("cannot write " + o.stats);
    stats << "scene,regions,small_regions,instances,steps,steps_per_region,step_cap_hits,mean_add_fraction,"
             "mean_remove_fraction\n";
  }
  const auto log = logger(c);
  for (const auto& p : scenes) {
    const Scene scene = load_prepared(p, o.delta, o.pca_k, o.use_cache);
    const auto res = segment_scene(scene, predictor, grow, search);
    const auto target = labels_target(o.out, o.out_dir, p, scenes.size());
    write_labels(scene.cloud, res.labels, target, o.ply);
    const auto& s = res.stats;
    if (stats)
      stats << p.stem().string() << ',' << s.regions << ',' << s.small_regions << ',' << s.instances << ',' << s.steps
            << ',' << s.steps_per_region() << ',' << s.step_cap_hits << ',' << s.mean_add_fraction << ','
            << s.mean_remove_fraction << '\n';
    if (log)
      log(p.stem().string() + ": " + std::to_string(s.instances) + " instances, " + std::to_string(s.steps) +
          " steps -> " + target.string());
  }
}

void run_baseline(const BaselineOpts& o, const Common& c) {
  const auto scenes = resolve(o.src);
  const auto log = logger(c);
  for (const auto& p : scenes) {
    const Scene scene = load_prepared(p, o.delta, o.pca_k, o.use_cache);
    InstanceLabels labels;
    if (o.method == "threshold") {
      ThresholdConfig t = o.threshold;
      t.min_segment = o.min_segment;
      labels = grow_threshold(scene, t);
    } else if (o.method == "smoothness") {
      SmoothnessConfig s = o.smooth;
      s.min_segment = o.min_segment;
      labels = grow_smoothness(scene, s);
    } else {
      throw ParameterError("--method must be threshold or smoothness");
    }
    const auto target = labels_target(o.out, o.out_dir, p, scenes.size());
    write_labels(scene.cloud, labels, target, o.ply);
    if (log) log(p.stem().string() + ": " + std::to_string(labels.max_id()) + " instances -> " + target.string());
  }
}

// ---- eval ---------------------------------------------------------------------
struct EvalOpts {
  SceneSource src;
  std::vector<std::string> pred;
  std::string pred_dir;
  std::string stats;
  std::string out;
};

std::map<std::string, double> read_steps(const std::string& path) {
  std::map<std::string, double> steps;
  if (path.empty()) return steps;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (cols.size() >= 6) steps[cols[0]] = std::stod(cols[5]);
  }
  return steps;
}

void run_eval(const EvalOpts& o, const Common&) {
  const auto scenes = resolve(o.src);
  if (!o.pred.empty() && o.pred.size() != scenes.size())
    throw ParameterError("--pred must list one labels file per scene");
  const auto steps = read_steps(o.stats);
  std::vector<SceneMetrics> rows;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const PointCloud cloud = load_scene(scenes[i]);
    if (!cloud.has_labels()) throw ParameterError(scenes[i].string() + ": scene has no ground-truth instance column");
    const std::string name = scenes[i].stem().string();
    const fs::path pred_path = !o.pred.empty() ? fs::path(o.pred[i]) : fs::path(o.pred_dir) / (name + ".labels");
    const InstanceLabels pred = load_labels(pred_path);
    if (pred.size() != cloud.size()) throw ParameterError(pred_path.string() + ": label count does not match the scene");
    const auto it = steps.find(name);
    rows.push_back(evaluate_scene(cloud.gt_labels(), pred, name, it == steps.end() ? 0.0 : it->second));
  }
  if (o.out.empty()) {
    write_metrics_csv(std::cout, rows);
  } else {
    std::ofstream f(o.out);
    if (!f) throw IoError("cannot write " + o.out);
    write_metrics_csv(f, rows);
  }
}

// ---- ablate -------------------------------------------------------------------
struct AblateOpts {
  std::string data_dir;
  std::string work = "ablation";
  std::string out;
  std::vector<std::string> variants;
  int ij = 128;
  int reduced_ij = 32;
  SimulationConfig sim;
  TrainConfig tc;
  GrowConfig grow;
  std::uint64_t seed = 0;
};

void run_ablate(const AblateOpts& o, const Common& c) {
  const auto log = logger(c);
  std::vector<PointCloud> train_clouds;
  for (const auto& p : manifest_scenes(o.data_dir, "train")) train_clouds.push_back(load_scene(p));
  std::vector<Scene> test;
  for (const auto& p : manifest_scenes(o.data_dir, "test")) test.push_back(prepare_scene(load_scene(p), o.sim.delta, o.sim.pca_k));
  if (train_clouds.empty() || test.empty()) throw ParameterError("ablation needs both train and test scenes");

  const auto all = ablation_variants(static_cast<std::uint32_t>(o.ij), static_cast<std::uint32_t>(o.reduced_ij));
  std::vector<AblationVariant> chosen;
  if (o.variants.empty())
    chosen = all;
  else
    for (const auto& n : o.variants) chosen.push_back(find_variant(all, n));

  AblationConfig cfg;
  cfg.sim = o.sim;
  cfg.train = o.tc;
  cfg.grow = o.grow;
  cfg.search.seed = o.seed;
  cfg.seed = o.seed;
  cfg.work_dir = o.work;
  const auto result = run_ablation(train_clouds, test, cfg, chosen, log);
  if (o.out.empty()) {
    write_ablation_csv(std::cout, result.rows);
  } else {
    std::ofstream f(o.out);
    if (!f) throw IoError("cannot write " + o.out);
    write_ablation_csv(f, result.rows);
  }
}

void add_grow_options(CLI::App* sub, GrowConfig& g) {
  sub->add_option("--min-segment", g.min_segment, "Regions smaller than this are reassigned")->check(CLI::PositiveNumber);
  sub->add_option("--max-steps", g.max_steps, "Step cap per region")->check(CLI::PositiveNumber);
}

void add_sim_options(CLI::App* sub, SimulationConfig& s) {
  sub->add_option("--delta", s.delta, "Neighborhood radius (m)")->check(CLI::PositiveNumber);
  sub->add_option("--pca-k", s.pca_k, "Neighbors for normals/curvature")->check(CLI::Range(3, 1 << 20));
  sub->add_option("--alpha-min", s.alpha_min, "Lower bound of the initial mistake probability")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--alpha-max", s.alpha_max, "Upper bound of the initial mistake probability")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--decay", s.decay, "Mistake probability decay per step")->check(CLI::NonNegativeNumber);
  sub->add_option("--copies", s.copies, "Simulation passes per scene")->check(CLI::PositiveNumber);
}

void add_train_options(CLI::App* sub, TrainConfig& t) {
  sub->add_option("--lr", t.lr, "ADAM learning rate")->check(CLI::PositiveNumber);
  sub->add_option("--batch", t.batch_size, "Batch size")->check(CLI::PositiveNumber);
  sub->add_option("--epochs", t.epochs, "Training epochs")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned region growing for class-agnostic point cloud segmentation"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Read options from a key = value file (flags override it)");
  app.require_subcommand(1);
  Common common;
  app.add_option("--jobs", common.jobs, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", common.quiet, "Suppress progress messages");

  SynthOpts synth;
  auto* s_synth = app.add_subcommand("synth", "Generate synthetic labeled rooms split into train/ and test/");
  s_synth->add_option("--out", synth.out, "Output directory")->required();
  s_synth->add_option("--train", synth.n_train, "Training rooms")->check(CLI::NonNegativeNumber);
  s_synth->add_option("--test", synth.n_test, "Test rooms")->check(CLI::NonNegativeNumber);
  s_synth->add_option("--seed", synth.seed, "Base seed");
  s_synth->add_option("--spacing", synth.room.spacing, "Surface sampling spacing (m)")->check(CLI::PositiveNumber);
  s_synth->add_option("--extent", synth.extent, "Room size X Y Z (m)")->expected(3);
  s_synth->add_option("--objects", synth.objects, "Object count range MIN MAX")->expected(2);
  s_synth->add_option("--color-noise", synth.room.color_noise, "Color noise sigma (0..255 units)");

  FeaturesOpts feats;
  auto* s_feat = app.add_subcommand("features", "Precompute per-point features into <scene>.lrgf");
  add_source(s_feat, feats.src, "train");
  s_feat->add_option("--pca-k", feats.pca_k, "Neighbors for normals/curvature")->check(CLI::Range(3, 1 << 20));

  SimulateOpts simo;
  auto* s_sim = app.add_subcommand("simulate", "Simulate noisy region growing into a training dataset");
  add_source(s_sim, simo.src, "train");
  s_sim->add_option("--out", simo.out, "Dataset file")->required();
  s_sim->add_option("--scale", simo.scale, "desk (I=J=128) or large (I=J=512)");
  s_sim->add_option("--ij", simo.ij, "Inlier and neighbor set size (overrides --scale)")->check(CLI::NonNegativeNumber);
  s_sim->add_option("--feature-set", simo.feature_set, "full, xyz or xyz-rgb");
  s_sim->add_flag("--no-normalize", simo.no_normalize, "Skip median-centering of the inputs");
  s_sim->add_flag("--no-augment", simo.no_augment, "Skip random flips/rotations");
  s_sim->add_option("--seed", simo.seed, "Random seed");
  add_sim_options(s_sim, simo.sim);

  TrainOpts tro;
  auto* s_train = app.add_subcommand("train", "Train the network on a simulated dataset");
  s_train->add_option("--data", tro.data, "Dataset file")->required();
  s_train->add_option("--out", tro.out, "Model checkpoint (rewritten every epoch)")->required();
  s_train->add_option("--arch", tro.arch, "desk or large widths");
  s_train->add_option("--encoder", tro.encoder, "Encoder widths, comma separated (overrides --arch)");
  s_train->add_option("--decoder", tro.decoder, "Decoder widths, comma separated; last must be 1");
  s_train->add_option("--skip-layer", tro.skip_layer, "Encoder layer feeding the decoders (1-based)");
  s_train->add_option("--seed", tro.tc.seed, "Random seed");
  add_train_options(s_train, tro.tc);

  SegmentOpts seg;
  auto* s_seg = app.add_subcommand("segment", "Segment scenes with a trained model");
  add_source(s_seg, seg.src, "test");
  s_seg->add_option("--model", seg.model, "Model checkpoint")->required();
  s_seg->add_option("--out", seg.out, "Labels file (single scene)");
  s_seg->add_option("--out-dir", seg.out_dir, "Directory for <scene>.labels");
  s_seg->add_option("--strategy", seg.strategy, "greedy, rr-ml, rr-np, bs-ml or bs-np");
  s_seg->add_option("--restarts", seg.search.restarts, "Random restarts")->check(CLI::PositiveNumber);
  s_seg->add_option("--beam", seg.search.beam_width, "Beam width")->check(CLI::PositiveNumber);
  s_seg->add_option("--expansions", seg.search.expansions, "Expansions per beam state")->check(CLI::PositiveNumber);
  s_seg->add_option("--seeding", seg.seeding, "min-curvature or random");
  s_seg->add_flag("--no-remove-mask", seg.no_remove_mask, "Ignore the predicted remove mask");
  s_seg->add_option("--seed", seg.search.seed, "Random seed");
  s_seg->add_option("--delta", seg.delta, "Neighborhood radius (m)")->check(CLI::PositiveNumber);
  s_seg->add_option("--pca-k", seg.pca_k, "Neighbors for normals/curvature")->check(CLI::Range(3, 1 << 20));
  s_seg->add_flag("--feature-cache", seg.use_cache, "Use <scene>.lrgf when present");
  s_seg->add_flag("--ply", seg.ply, "Also write a colored PLY next to each labels file");
  s_seg->add_option("--stats", seg.stats, "Write per-scene growth statistics (CSV)");
  add_grow_options(s_seg, seg.grow);

  BaselineOpts base;
  auto* s_base = app.add_subcommand("baseline", "Segment scenes with a classical region-growing baseline");
  add_source(s_base, base.src, "test");
  s_base->add_option("--method", base.method, "threshold or smoothness");
  s_base->add_option("--out", base.out, "Labels file (single scene)");
  s_base->add_option("--out-dir", base.out_dir, "Directory for <scene>.labels");
  s_base->add_option("--normal-angle", base.threshold.normal_angle_max, "threshold: max normal angle (deg)");
  s_base->add_option("--color-dist", base.threshold.color_dist_max, "threshold: max RGB distance (unit scale)");
  s_base->add_option("--theta", base.smooth.theta_max, "smoothness: max normal angle (deg)");
  s_base->add_option("--curvature", base.smooth.curvature_max, "smoothness: max curvature of a growth front");
  s_base->add_option("--min-segment", base.min_segment, "Regions smaller than this are reassigned")->check(CLI::PositiveNumber);
  s_base->add_option("--delta", base.delta, "Neighborhood radius (m)")->check(CLI::PositiveNumber);
  s_base->add_option("--pca-k", base.pca_k, "Neighbors for normals/curvature")->check(CLI::Range(3, 1 << 20));
  s_base->add_flag("--feature-cache", base.use_cache, "Use <scene>.lrgf when present");
  s_base->add_flag("--ply", base.ply, "Also write a colored PLY next to each labels file");

  EvalOpts ev;
  auto* s_eval = app.add_subcommand("eval", "Score predicted labels against ground truth (CSV)");
  add_source(s_eval, ev.src, "test");
  s_eval->add_option("--pred", ev.pred, "Labels file(s), one per scene");
  s_eval->add_option("--pred-dir", ev.pred_dir, "Directory holding <scene>.labels");
  s_eval->add_option("--stats", ev.stats, "Statistics CSV from `segment` (fills the steps column)");
  s_eval->add_option("--out", ev.out, "CSV file (default: stdout)");

  AblateOpts ab;
  auto* s_ab = app.add_subcommand("ablate", "Train and score the ablation variants on a synth directory");
  s_ab->add_option("--data", ab.data_dir, "Directory written by `synth`")->required();
  s_ab->add_option("--work", ab.work, "Directory for datasets and checkpoints");
  s_ab->add_option("--out", ab.out, "CSV file (default: stdout)");
  s_ab->add_option("--variants", ab.variants,
                   "Subset of: full, only-xyz, only-xyz-rgb, ij-<reduced>, no-remove-mask, random-seeding, "
                   "no-normalization");
  s_ab->add_option("--ij", ab.ij, "Inlier/neighbor set size of the full variant")->check(CLI::PositiveNumber);
  s_ab->add_option("--reduced-ij", ab.reduced_ij, "Set size of the reduced I/J variant")->check(CLI::PositiveNumber);
  s_ab->add_option("--seed", ab.seed, "Random seed");
  add_sim_options(s_ab, ab.sim);
  add_train_options(s_ab, ab.tc);
  add_grow_options(s_ab, ab.grow);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (common.jobs > 0) omp_set_num_threads(common.jobs);
    ab.tc.seed = ab.seed;
    if (*s_synth) run_synth(synth, common);
    if (*s_feat) run_features(feats, common);
    if (*s_sim) run_simulate(simo, common);
    if (*s_train) run_train(tro, common);
    if (*s_seg) run_segment(seg, common);
    if (*s_base) run_baseline(base, common);
    if (*s_eval) run_eval(ev, common);
    if (*s_ab) run_ablate(ab, common);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
