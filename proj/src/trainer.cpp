#include "lrg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lrg/error.hpp"
#include "lrg/rng.hpp"

namespace lrg {

template <typename Scalar>
void adam_step(AdamState<Scalar>& s, std::span<Scalar> params, std::span<const Scalar> grads) {
  if (params.size() != grads.size() || s.m.size() != params.size() || s.v.size() != params.size())
    throw ContractError("adam_step: shape mismatch");
  ++s.t;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double m = s.beta1 * s.m[i] + (1.0 - s.beta1) * g;
    const double v = s.beta2 * s.v[i] + (1.0 - s.beta2) * g * g;
    s.m[i] = static_cast<Scalar>(m);
    s.v[i] = static_cast<Scalar>(v);
    params[i] = static_cast<Scalar>(params[i] - s.lr * (m / c1) / (std::sqrt(v / c2) + s.eps));
  }
}

template void adam_step<float>(AdamState<float>&, std::span<float>, std::span<const float>);
template void adam_step<double>(AdamState<double>&, std::span<double>, std::span<const double>);

double BatchGradient::compute(std::span<const float> params, std::span<const TrainingSample* const> batch,
                              std::vector<float>& grad, Exec exec) {
  const std::size_t P = net_->num_params();
  const std::size_t B = batch.size();
  if (B == 0) throw ContractError("empty batch");
  grad.assign(P, 0.0f);
  loss_.assign(B, 0.0);
  std::vector<double> acc(P, 0.0);

  auto one = [&](std::size_t i, ForwardCache<float>& cache, std::span<float> g) {
    const TrainingSample& s = *batch[i];
    const auto pred = net_->forward(params, s.inliers, s.neighbors, &cache);
    loss_[i] = bce_loss(pred, s.remove_target, s.add_target);
    std::fill(g.begin(), g.end(), 0.0f);
    net_->backward(params, cache, s.remove_target, s.add_target, g);
  };

  if (exec == Exec::serial) {
    ForwardCache<float> cache;
    std::vector<float> g(P);
    for (std::size_t i = 0; i < B; ++i) {
      one(i, cache, g);
      for (std::size_t k = 0; k < P; ++k) acc[k] += g[k];
    }
  } else {
    per_sample_.resize(B * P);
    const auto nb = static_cast<std::ptrdiff_t>(B);
#pragma omp parallel
    {
      ForwardCache<float> cache;
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t i = 0; i < nb; ++i) {
        const auto u = static_cast<std::size_t>(i);
        one(u, cache, std::span<float>(per_sample_.data() + u * P, P));
      }
    }
    const auto np = static_cast<std::ptrdiff_t>(P);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < np; ++k) {
      double a = 0.0;
      for (std::size_t i = 0; i < B; ++i) a += per_sample_[i * P + static_cast<std::size_t>(k)];
      acc[static_cast<std::size_t>(k)] = a;
    }
  }
  const double inv = 1.0 / static_cast<double>(B);
  for (std::size_t k = 0; k < P; ++k) grad[k] = static_cast<float>(acc[k] * inv);
  double total = 0.0;
  for (double l : loss_) total += l;
  return total * inv;
}

TrainResult train(const DatasetReader& data, const TrainConfig& cfg) {
  if (data.size() == 0) throw ParameterError("training dataset is empty");
  if (cfg.batch_size == 0) throw ParameterError("batch size must be >= 1");
  if (cfg.epochs < 0) throw ParameterError("epochs must be >= 0");
  const auto& h = data.header();
  if (h.num_features != kNumFeatures) throw ParameterError("dataset feature width does not match the network input");
  if ((cfg.inlier_count != 0 && cfg.inlier_count != h.inlier_count) ||
      (cfg.neighbor_count != 0 && cfg.neighbor_count != h.neighbor_count))
    throw ParameterError("dataset I/J (" + std::to_string(h.inlier_count) + "/" + std::to_string(h.neighbor_count) +
                         ") do not match the training configuration");

  TrainResult result;
  result.model.config.arch = cfg.arch;
  result.model.config.inlier_count = h.inlier_count;
  result.model.config.neighbor_count = h.neighbor_count;
  result.model.config.input.feature_set = h.feature_set;
  result.model.config.input.normalize = h.normalized;

  const Network<float> net(cfg.arch);
  auto& params = result.model.params;
  params = init_params(cfg.arch, derive_seed(cfg.seed, {0x1417}));
  AdamState<float> adam(params.size(), cfg.lr);
  BatchGradient bg(net);
  std::vector<float> grad;

  Rng shuffle_rng(derive_seed(cfg.seed, {0x5417}));
  std::vector<std::size_t> order(data.size());
  std::vector<TrainingSample> storage;
  std::vector<const TrainingSample*> batch;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      storage.clear();
      for (std::size_t i = start; i < end; ++i) storage.push_back(data.read(order[i]));
      batch.clear();
      for (const auto& s : storage) batch.push_back(&s);
      const double loss = bg.compute(params, batch, grad, cfg.exec);
      loss_sum += loss * static_cast<double>(end - start);
      adam_step<float>(adam, params, grad);
    }
    const double mean = loss_sum / static_cast<double>(order.size());
    result.epoch_loss.push_back(mean);
    if (cfg.checkpoint) save_model(result.model, *cfg.checkpoint);
    if (cfg.on_epoch) cfg.on_epoch(epoch, mean);
  }
  return result;
}

}  // namespace lrg
