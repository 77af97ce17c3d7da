#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lrg/dataset.hpp"
#include "lrg/network.hpp"

namespace lrg {

template <typename Scalar>
struct AdamState {
  std::vector<Scalar> m;
  std::vector<Scalar> v;
  std::int64_t t = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate) : m(n, Scalar(0)), v(n, Scalar(0)), lr(learning_rate) {}
};

// One bias-corrected ADAM update; increments t.
template <typename Scalar>
void adam_step(AdamState<Scalar>& state, std::span<Scalar> params, std::span<const Scalar> grads);

// Per-sample gradients are summed in sample order in double precision, so the
// serial and OpenMP paths produce bit-identical results for any thread count.
class BatchGradient {
 public:
  explicit BatchGradient(const Network<float>& net) : net_(&net) {}

  // Gradient of the mean per-sample loss over `batch` into `grad`; returns that mean loss.
  double compute(std::span<const float> params, std::span<const TrainingSample* const> batch, std::vector<float>& grad,
                 Exec exec = Exec::parallel);

 private:
  const Network<float>* net_;
  std::vector<float> per_sample_;
  std::vector<double> loss_;
};

struct TrainConfig {
  double lr = 0.001;
  std::size_t batch_size = 100;
  int epochs = 10;
  std::uint64_t seed = 0;
  Architecture arch;
  // 0 = take from the dataset header; otherwise must match it.
  std::uint32_t inlier_count = 0;
  std::uint32_t neighbor_count = 0;
  std::optional<std::filesystem::path> checkpoint;  // rewritten after every epoch
  std::function<void(int epoch, double mean_loss)> on_epoch;
  Exec exec = Exec::parallel;
};

struct TrainResult {
  Model model;
  std::vector<double> epoch_loss;
};

TrainResult train(const DatasetReader& data, const TrainConfig& cfg);

}  // namespace lrg
