#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lrg/grower.hpp"

namespace lrg {

enum class Strategy { greedy, rr_ml, rr_np, bs_ml, bs_np };
Strategy parse_strategy(std::string_view s);
std::string_view to_string(Strategy s);

struct SearchConfig {
  Strategy strategy = Strategy::greedy;
  int restarts = 10;
  int beam_width = 3;
  int expansions = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SearchResult {
  std::vector<PointIndex> members;  // ascending
  double criterion = 0.0;           // loglik (ML, greedy) or point count (NP)
  long steps = 0;                   // grow steps over every rollout/expansion
  GrowResult winner;                // telemetry of the committed rollout (members duplicated above)
  std::size_t peak_beam = 0;        // beam search: widest surviving beam
};

SearchResult run_search(const Scene& scene, const InstanceLabels& labels, const MaskPredictor& predictor, PointIndex seed,
                        const GrowConfig& grow, const SearchConfig& cfg, Rng& rng);

double accumulate_loglik(std::span<const GrowStep> steps);

}  // namespace lrg
