#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lrg/features.hpp"
#include "lrg/kernels.hpp"

namespace lrg {

// Widths of the dual-branch point-wise network. Both input branches share the
// encoder shape (last width = global feature width G); both decoders share the
// decoder shape (last width = 1, a logit per point).
struct Architecture {
  std::vector<int> encoder{32, 32, 32, 64, 128};
  std::vector<int> decoder{64, 32, 1};
  int skip_layer = 2;  // 1-based encoder layer whose output feeds the decoders

  int global_width() const { return encoder.back(); }
  int skip_width() const { return encoder.at(static_cast<std::size_t>(skip_layer - 1)); }
  void validate() const;

  static Architecture desk_scale() { return {}; }
  static Architecture large_scale() { return {{64, 64, 64, 128, 512}, {256, 128, 1}, 2}; }

  bool operator==(const Architecture&) const = default;
};

// Everything a trained model needs to be applied consistently.
struct ModelConfig {
  Architecture arch;
  std::uint32_t inlier_count = 128;
  std::uint32_t neighbor_count = 128;
  InputOptions input;

  bool operator==(const ModelConfig& o) const {
    return arch == o.arch && inlier_count == o.inlier_count && neighbor_count == o.neighbor_count &&
           input.feature_set == o.input.feature_set && input.normalize == o.input.normalize;
  }
};

// Offsets of every tensor in the flat parameter vector. Declaration order:
// encoder[inlier], encoder[neighbor], decoder[remove], decoder[add]; per layer W then b.
// W is stored column-major with shape (fan_in x fan_out).
struct LayerSlot {
  std::size_t w = 0;
  std::size_t b = 0;
  int in = 0;
  int out = 0;
};

class ParamLayout {
 public:
  explicit ParamLayout(const Architecture& arch);

  std::size_t size() const { return total_; }
  const LayerSlot& encoder(int branch, std::size_t layer) const { return enc_[branch][layer]; }
  const LayerSlot& decoder(int branch, std::size_t layer) const { return dec_[branch][layer]; }
  std::size_t encoder_layers() const { return enc_[0].size(); }
  std::size_t decoder_layers() const { return dec_[0].size(); }
  std::vector<LayerSlot> all() const;

 private:
  std::array<std::vector<LayerSlot>, 2> enc_;
  std::array<std::vector<LayerSlot>, 2> dec_;
  std::size_t total_ = 0;
};

inline constexpr double kProbClampLow = 1e-7;
inline constexpr double kProbClampHigh = 1.0 - 1e-7;

template <typename Scalar>
struct MaskPrediction {
  kernels::Vec<Scalar> remove_prob;  // I, one per inlier slot
  kernels::Vec<Scalar> add_prob;     // J, one per neighbor slot
};

// Activations kept by forward() for backward().
template <typename Scalar>
struct ForwardCache {
  struct Branch {
    kernels::Mat<Scalar> input;
    std::vector<kernels::Mat<Scalar>> encoder;  // post-activation, per layer
    std::vector<Eigen::Index> argmax;           // per global feature: first row attaining the max
    std::vector<kernels::Mat<Scalar>> decoder;  // post-activation hidden layers, then logits
    kernels::Vec<Scalar> sigmoid;               // unclamped
  };
  std::array<Branch, 2> branch;
  kernels::Vec<Scalar> global;  // 2G
};

template <typename Scalar>
class Network {
 public:
  explicit Network(Architecture arch, kernels::Kernel kernel = kernels::Kernel::blas);

  const Architecture& arch() const { return arch_; }
  const ParamLayout& layout() const { return layout_; }
  std::size_t num_params() const { return layout_.size(); }

  MaskPrediction<Scalar> forward(std::span<const Scalar> params, const FeatureRows<Scalar>& inliers,
                                 const FeatureRows<Scalar>& neighbors, ForwardCache<Scalar>* cache = nullptr) const;

  // Adds dLoss/dparams for the sample cached by the matching forward() into `grads`.
  void backward(std::span<const Scalar> params, const ForwardCache<Scalar>& cache,
                std::span<const std::uint8_t> remove_target, std::span<const std::uint8_t> add_target,
                std::span<Scalar> grads) const;

 private:
  Architecture arch_;
  ParamLayout layout_;
  kernels::Kernel kernel_;
};

// Mean remove-mask BCE over I plus mean add-mask BCE over J, on clamped probabilities.
template <typename Scalar>
double bce_loss(const MaskPrediction<Scalar>& pred, std::span<const std::uint8_t> remove_target,
                std::span<const std::uint8_t> add_target);

// Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases.
std::vector<float> init_params(const Architecture& arch, std::uint64_t seed);

struct Model {
  ModelConfig config;
  std::vector<float> params;
};

// Checkpoint: magic "LRGM", version, F, I, J, feature set, normalize, skip layer,
// encoder widths, decoder widths, parameter count, then little-endian f32 tensors.
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);
// Throws unless the stored configuration equals `expected`.
Model load_model(const std::filesystem::path& path, const ModelConfig& expected);

}  // namespace lrg
