#include "lrg/search.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <string>
#include <unordered_set>

#include "lrg/error.hpp"

namespace lrg {

Strategy parse_strategy(std::string_view s) {
  std::string k(s);
  std::replace(k.begin(), k.end(), '_', '-');
  if (k == "greedy") return Strategy::greedy;
  if (k == "rr-ml") return Strategy::rr_ml;
  if (k == "rr-np") return Strategy::rr_np;
  if (k == "bs-ml") return Strategy::bs_ml;
  if (k == "bs-np") return Strategy::bs_np;
  throw ParameterError("unknown search strategy '" + std::string(s) + "' (greedy|rr-ml|rr-np|bs-ml|bs-np)");
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::greedy: return "greedy";
    case Strategy::rr_ml: return "rr-ml";
    case Strategy::rr_np: return "rr-np";
    case Strategy::bs_ml: return "bs-ml";
    case Strategy::bs_np: return "bs-np";
  }
  return "greedy";
}

void SearchConfig::validate() const {
  if (restarts < 1) throw ParameterError("restarts must be >= 1");
  if (beam_width < 1) throw ParameterError("beam width must be >= 1");
  if (expansions < 1) throw ParameterError("expansions must be >= 1");
}

double accumulate_loglik(std::span<const GrowStep> steps) {
  double s = 0.0;
  for (const auto& st : steps) s += st.step_loglik;
  return s;
}

namespace {

bool by_size(Strategy s) { return s == Strategy::rr_np || s == Strategy::bs_np; }

// Runs body(i) for i in [0, n) under OpenMP, rethrowing the first exception.
template <typename F>
void parallel_for(int n, F&& body) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(lrg_search_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

SearchResult random_restarts(const Scene& scene, const InstanceLabels& labels, const MaskPredictor& predictor,
                             PointIndex seed, const GrowConfig& grow, const SearchConfig& cfg, Rng& rng) {
  const std::uint64_t base = rng.engine()();
  std::vector<GrowResult> runs(static_cast<std::size_t>(cfg.restarts));
  parallel_for(cfg.restarts, [&](int r) {
    Rng sub(derive_seed(base, {static_cast<std::uint64_t>(r)}));
    runs[static_cast<std::size_t>(r)] = grow_region(scene, labels, predictor, seed, Policy::stochastic, sub, grow);
  });
  const bool np = by_size(cfg.strategy);
  std::size_t best = 0;
  long steps = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    steps += runs[r].steps;
    const bool better = np ? runs[r].members.size() > runs[best].members.size() : runs[r].loglik > runs[best].loglik;
    if (better) best = r;
  }
  SearchResult out;
  out.winner = std::move(runs[best]);
  out.members = out.winner.members;
  out.criterion = np ? static_cast<double>(out.members.size()) : out.winner.loglik;
  out.steps = steps;
  return out;
}

struct BeamNode {
  RegionState state;
  GrowResult tele;
};

SearchResult beam_search(const Scene& scene, const InstanceLabels& labels, const MaskPredictor& predictor,
                         PointIndex seed, const GrowConfig& grow, const SearchConfig& cfg, Rng& rng) {
  const bool np = by_size(cfg.strategy);
  auto score = [np](const BeamNode& b) {
    return np ? static_cast<double>(b.state.region.size()) : b.state.loglik;
  };
  if (labels[seed] != InstanceLabels::kUnassigned) throw ContractError("beam search: seed point is already labeled");

  const std::uint64_t base = rng.engine()();
  std::vector<BeamNode> live;
  live.push_back({RegionState(scene.graph, labels, seed), {}});
  std::vector<BeamNode> pool;
  long steps = 0;
  std::size_t peak = 1;

  for (std::uint64_t iter = 0; !live.empty(); ++iter) {
    const int e = cfg.expansions;
    const int n = static_cast<int>(live.size()) * e;
    std::vector<std::optional<BeamNode>> next(static_cast<std::size_t>(n));
    std::vector<Termination> term(static_cast<std::size_t>(n));
    parallel_for(n, [&](int i) {
      const auto bi = static_cast<std::size_t>(i / e);
      BeamNode c = live[bi];
      Rng sub(derive_seed(base, {iter, bi, static_cast<std::uint64_t>(i % e)}));
      const GrowStep s = grow_step(scene, predictor, c.state, Policy::stochastic, sub, grow);
      c.tele.added += s.added.size();
      c.tele.removed += s.removed.size();
      if (s.neighbor_candidates) c.tele.add_fraction_sum += static_cast<double>(s.added.size()) / s.neighbor_candidates;
      if (s.inlier_candidates) c.tele.remove_fraction_sum += static_cast<double>(s.removed.size()) / s.inlier_candidates;
      c.tele.termination = s.termination;
      term[static_cast<std::size_t>(i)] = s.termination;
      next[static_cast<std::size_t>(i)] = std::move(c);
    });
    steps += n;

    std::vector<BeamNode> cand;
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (term[i] != Termination::none) {
        pool.push_back(std::move(*next[i]));
        continue;
      }
      if (seen.insert(membership_hash(next[i]->state.region)).second) cand.push_back(std::move(*next[i]));
    }
    std::stable_sort(cand.begin(), cand.end(), [&](const BeamNode& a, const BeamNode& b) { return score(a) > score(b); });
    if (cand.size() > static_cast<std::size_t>(cfg.beam_width)) cand.erase(cand.begin() + cfg.beam_width, cand.end());
    live = std::move(cand);
    peak = std::max(peak, live.size());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i)
    if (score(pool[i]) > score(pool[best])) best = i;
  BeamNode& w = pool[best];
  SearchResult out;
  out.winner = std::move(w.tele);
  out.winner.loglik = w.state.loglik;
  out.winner.steps = w.state.step;
  out.winner.members = w.state.region.sorted_members();
  out.members = out.winner.members;
  out.criterion = score(w);
  out.steps = steps;
  out.peak_beam = peak;
  return out;
}

}  // namespace

SearchResult run_search(const Scene& scene, const InstanceLabels& labels, const MaskPredictor& predictor, PointIndex seed,
                        const GrowConfig& grow, const SearchConfig& cfg, Rng& rng) {
  cfg.validate();
  switch (cfg.strategy) {
    case Strategy::greedy: {
      SearchResult out;
      out.winner = grow_region(scene, labels, predictor, seed, Policy::greedy, rng, grow);
      out.members = out.winner.members;
      out.criterion = out.winner.loglik;
      out.steps = out.winner.steps;
      return out;
    }
    case Strategy::rr_ml:
    case Strategy::rr_np: return random_restarts(scene, labels, predictor, seed, grow, cfg, rng);
    case Strategy::bs_ml:
    case Strategy::bs_np: return beam_search(scene, labels, predictor, seed, grow, cfg, rng);
  }
  throw ContractError("unreachable search strategy");
}

}  // namespace lrg
