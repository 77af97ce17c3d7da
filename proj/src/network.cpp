#include "lrg/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lrg/error.hpp"
#include "lrg/rng.hpp"

namespace lrg {

using kernels::ConstMatMap;
using kernels::ConstVecMap;
using kernels::Mat;
using kernels::MatMap;
using kernels::Vec;
using kernels::VecMap;

void Architecture::validate() const {
  if (encoder.empty() || decoder.empty()) throw ParameterError("encoder and decoder need at least one layer");
  for (int w : encoder)
    if (w < 1) throw ParameterError("encoder widths must be positive");
  for (int w : decoder)
    if (w < 1) throw ParameterError("decoder widths must be positive");
  if (decoder.back() != 1) throw ParameterError("last decoder width must be 1");
  if (skip_layer < 1 || skip_layer > static_cast<int>(encoder.size()))
    throw ParameterError("skip layer must index an encoder layer (1-based)");
}

ParamLayout::ParamLayout(const Architecture& arch) {
  arch.validate();
  auto push = [&](std::vector<LayerSlot>& v, int in, int out) {
    LayerSlot s;
    s.in = in;
    s.out = out;
    s.w = total_;
    total_ += static_cast<std::size_t>(in) * static_cast<std::size_t>(out);
    s.b = total_;
    total_ += static_cast<std::size_t>(out);
    v.push_back(s);
  };
  for (int b = 0; b < 2; ++b) {
    int in = kNumFeatures;
    for (int w : arch.encoder) {
      push(enc_[b], in, w);
      in = w;
    }
  }
  for (int b = 0; b < 2; ++b) {
    int in = arch.skip_width() + 2 * arch.global_width();
    for (int w : arch.decoder) {
      push(dec_[b], in, w);
      in = w;
    }
  }
}

std::vector<LayerSlot> ParamLayout::all() const {
  std::vector<LayerSlot> v;
  for (int b = 0; b < 2; ++b) v.insert(v.end(), enc_[b].begin(), enc_[b].end());
  for (int b = 0; b < 2; ++b) v.insert(v.end(), dec_[b].begin(), dec_[b].end());
  return v;
}

namespace {

template <typename Scalar>
ConstMatMap<Scalar> weight(std::span<const Scalar> p, const LayerSlot& s) {
  return ConstMatMap<Scalar>(p.data() + s.w, s.in, s.out);
}
template <typename Scalar>
ConstVecMap<Scalar> bias(std::span<const Scalar> p, const LayerSlot& s) {
  return ConstVecMap<Scalar>(p.data() + s.b, s.out);
}
template <typename Scalar>
MatMap<Scalar> weight(std::span<Scalar> p, const LayerSlot& s) {
  return MatMap<Scalar>(p.data() + s.w, s.in, s.out);
}
template <typename Scalar>
VecMap<Scalar> bias(std::span<Scalar> p, const LayerSlot& s) {
  return VecMap<Scalar>(p.data() + s.b, s.out);
}

template <typename Scalar>
Scalar sigmoid(Scalar z) {
  return z >= 0 ? Scalar(1) / (Scalar(1) + std::exp(-z)) : std::exp(z) / (Scalar(1) + std::exp(z));
}

template <typename Scalar>
Scalar clamp_prob(Scalar p) {
  return std::clamp(p, static_cast<Scalar>(kProbClampLow), static_cast<Scalar>(kProbClampHigh));
}

}  // namespace

template <typename Scalar>
Network<Scalar>::Network(Architecture arch, kernels::Kernel kernel)
    : arch_(std::move(arch)), layout_(arch_), kernel_(kernel) {}

template <typename Scalar>
MaskPrediction<Scalar> Network<Scalar>::forward(std::span<const Scalar> params, const FeatureRows<Scalar>& inliers,
                                                const FeatureRows<Scalar>& neighbors,
                                                ForwardCache<Scalar>* cache) const {
  if (params.size() != layout_.size()) throw ContractError("parameter vector does not match the architecture");
  if (inliers.rows() < 1 || neighbors.rows() < 1) throw ContractError("network inputs must have at least one row");

  ForwardCache<Scalar> local;
  ForwardCache<Scalar>& c = cache ? *cache : local;
  const int G = arch_.global_width();
  const std::size_t L = layout_.encoder_layers();
  c.global.resize(2 * G);

  for (int b = 0; b < 2; ++b) {
    auto& br = c.branch[b];
    br.input = (b == 0 ? inliers : neighbors);
    br.encoder.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      const auto& slot = layout_.encoder(b, l);
      const Mat<Scalar>& prev = l == 0 ? br.input : br.encoder[l - 1];
      kernels::dense_forward<Scalar>(kernel_, prev, weight(params, slot), bias(params, slot), br.encoder[l]);
      kernels::relu_inplace(br.encoder[l]);
    }
    const Mat<Scalar>& top = br.encoder.back();
    br.argmax.assign(static_cast<std::size_t>(G), 0);
    for (int f = 0; f < G; ++f) {
      Eigen::Index best = 0;
      Scalar v = top(0, f);
      for (Eigen::Index r = 1; r < top.rows(); ++r)
        if (top(r, f) > v) {
          v = top(r, f);
          best = r;
        }
      br.argmax[static_cast<std::size_t>(f)] = best;
      c.global[b * G + f] = v;
    }
  }

  MaskPrediction<Scalar> out;
  const int ws = arch_.skip_width();
  const std::size_t D = layout_.decoder_layers();
  for (int b = 0; b < 2; ++b) {
    auto& br = c.branch[b];
    const Mat<Scalar>& skip = br.encoder[static_cast<std::size_t>(arch_.skip_layer - 1)];
    br.decoder.resize(D);
    for (std::size_t l = 0; l < D; ++l) {
      const auto& slot = layout_.decoder(b, l);
      const auto w = weight(params, slot);
      if (l == 0) {
        if (kernel_ == kernels::Kernel::blas) {
          // [S | 1 g^T] W + b  ==  S W_skip + 1 (g^T W_global + b)
          const Vec<Scalar> shared = w.bottomRows(2 * G).transpose() * c.global + bias(params, slot);
          auto& z = br.decoder[0];
          z.noalias() = skip * w.topRows(ws);
          z.rowwise() += shared.transpose();
        } else {
          Mat<Scalar> concat(skip.rows(), ws + 2 * G);
          concat.leftCols(ws) = skip;
          concat.rightCols(2 * G) = c.global.transpose().replicate(skip.rows(), 1);
          kernels::dense_forward<Scalar>(kernel_, concat, w, bias(params, slot), br.decoder[0]);
        }
      } else {
        kernels::dense_forward<Scalar>(kernel_, br.decoder[l - 1], w, bias(params, slot), br.decoder[l]);
      }
      if (l + 1 < D) kernels::relu_inplace(br.decoder[l]);
    }
    const Mat<Scalar>& logits = br.decoder.back();
    br.sigmoid.resize(logits.rows());
    Vec<Scalar>& prob = b == 0 ? out.remove_prob : out.add_prob;
    prob.resize(logits.rows());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
      br.sigmoid[r] = sigmoid(logits(r, 0));
      prob[r] = clamp_prob(br.sigmoid[r]);
    }
  }
  return out;
}

template <typename Scalar>
void Network<Scalar>::backward(std::span<const Scalar> params, const ForwardCache<Scalar>& c,
                               std::span<const std::uint8_t> remove_target, std::span<const std::uint8_t> add_target,
                               std::span<Scalar> grads) const {
  if (grads.size() != layout_.size() || params.size() != layout_.size())
    throw ContractError("gradient/parameter vector does not match the architecture");
  const int G = arch_.global_width();
  const int ws = arch_.skip_width();
  const std::size_t L = layout_.encoder_layers();
  const std::size_t D = layout_.decoder_layers();

  Vec<Scalar> dglobal = Vec<Scalar>::Zero(2 * G);
  std::array<Mat<Scalar>, 2> dskip;

  for (int b = 0; b < 2; ++b) {
    const auto& br = c.branch[b];
    const auto target = b == 0 ? remove_target : add_target;
    const Eigen::Index n = br.sigmoid.rows();
    if (static_cast<Eigen::Index>(target.size()) != n) throw ContractError("target length does not match cached forward");

    // d(mean BCE)/d(logit) = (p - t)/n, zero where the probability was clamped.
    Mat<Scalar> dz(n, 1);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Scalar p = br.sigmoid[r];
      const bool clamped = p < static_cast<Scalar>(kProbClampLow) || p > static_cast<Scalar>(kProbClampHigh);
      dz(r, 0) = clamped ? Scalar(0) : (p - static_cast<Scalar>(target[static_cast<std::size_t>(r)])) / static_cast<Scalar>(n);
    }

    const Mat<Scalar>& skip = br.encoder[static_cast<std::size_t>(arch_.skip_layer - 1)];
    Mat<Scalar> da;
    for (std::size_t l = D; l-- > 0;) {
      const auto& slot = layout_.decoder(b, l);
      const auto w = weight(params, slot);
      auto dw = weight(grads, slot);
      auto db = bias(grads, slot);
      if (l > 0) {
        const Mat<Scalar>& in = br.decoder[l - 1];
        kernels::dense_backward_params<Scalar>(kernel_, in, dz, dw, db);
        kernels::dense_backward_input<Scalar>(kernel_, dz, w, da);
        kernels::relu_backward_inplace(da, in);
        dz = std::move(da);
        continue;
      }
      if (kernel_ == kernels::Kernel::blas) {
        const Vec<Scalar> csum = dz.colwise().sum().transpose();
        dw.topRows(ws).noalias() += skip.transpose() * dz;
        dw.bottomRows(2 * G).noalias() += c.global * csum.transpose();
        db += csum;
        dskip[b].noalias() = dz * w.topRows(ws).transpose();
        dglobal.noalias() += w.bottomRows(2 * G) * csum;
      } else {
        Mat<Scalar> concat(skip.rows(), ws + 2 * G);
        concat.leftCols(ws) = skip;
        concat.rightCols(2 * G) = c.global.transpose().replicate(skip.rows(), 1);
        kernels::dense_backward_params<Scalar>(kernel_, concat, dz, dw, db);
        Mat<Scalar> dconcat;
        kernels::dense_backward_input<Scalar>(kernel_, dz, w, dconcat);
        dskip[b] = dconcat.leftCols(ws);
        for (int f = 0; f < 2 * G; ++f) {
          Scalar acc = 0;
          for (Eigen::Index r = 0; r < dconcat.rows(); ++r) acc += dconcat(r, ws + f);
          dglobal[f] += acc;
        }
      }
    }
  }

  for (int b = 0; b < 2; ++b) {
    const auto& br = c.branch[b];
    const Mat<Scalar>& top = br.encoder.back();
    Mat<Scalar> da = Mat<Scalar>::Zero(top.rows(), G);
    for (int f = 0; f < G; ++f) da(br.argmax[static_cast<std::size_t>(f)], f) += dglobal[b * G + f];

    for (std::size_t l = L; l-- > 0;) {
      if (static_cast<int>(l + 1) == arch_.skip_layer) da += dskip[b];
      kernels::relu_backward_inplace(da, br.encoder[l]);
      const auto& slot = layout_.encoder(b, l);
      const Mat<Scalar>& in = l == 0 ? br.input : br.encoder[l - 1];
      kernels::dense_backward_params<Scalar>(kernel_, in, da, weight(grads, slot), bias(grads, slot));
      if (l > 0) {
        Mat<Scalar> prev;
        kernels::dense_backward_input<Scalar>(kernel_, da, weight(params, slot), prev);
        da = std::move(prev);
      }
    }
  }
}

template <typename Scalar>
double bce_loss(const MaskPrediction<Scalar>& pred, std::span<const std::uint8_t> remove_target,
                std::span<const std::uint8_t> add_target) {
  auto term = [](const Vec<Scalar>& p, std::span<const std::uint8_t> t) {
    if (static_cast<std::size_t>(p.size()) != t.size()) throw ContractError("bce_loss: target length mismatch");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double q = std::clamp(static_cast<double>(p[i]), kProbClampLow, kProbClampHigh);
      acc += t[static_cast<std::size_t>(i)] ? std::log(q) : std::log1p(-q);
    }
    return -acc / static_cast<double>(p.size());
  };
  return term(pred.remove_prob, remove_target) + term(pred.add_prob, add_target);
}

template class Network<float>;
template class Network<double>;
template double bce_loss<float>(const MaskPrediction<float>&, std::span<const std::uint8_t>, std::span<const std::uint8_t>);
template double bce_loss<double>(const MaskPrediction<double>&, std::span<const std::uint8_t>, std::span<const std::uint8_t>);

std::vector<float> init_params(const Architecture& arch, std::uint64_t seed) {
  const ParamLayout layout(arch);
  std::vector<float> p(layout.size(), 0.0f);
  Rng rng(seed);
  for (const auto& s : layout.all()) {
    const double limit = std::sqrt(6.0 / (s.in + s.out));
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.in) * s.out; ++i)
      p[s.w + i] = static_cast<float>(rng.uniform(-limit, limit));
  }
  return p;
}

// ---- checkpoint I/O ----

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes a little-endian host");

namespace {

constexpr char kModelMagic[4] = {'L', 'R', 'G', 'M'};
constexpr std::uint32_t kModelVersion = 1;

void put_u32(std::ofstream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::ifstream& is, const std::filesystem::path& path) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 4)) throw IoError("truncated checkpoint: " + path.string());
  return v;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
  const auto& cfg = model.config;
  const ParamLayout layout(cfg.arch);
  if (model.params.size() != layout.size()) throw ContractError("model parameters do not match its architecture");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
  os.write(kModelMagic, 4);
  put_u32(os, kModelVersion);
  put_u32(os, kNumFeatures);
  put_u32(os, cfg.inlier_count);
  put_u32(os, cfg.neighbor_count);
  put_u32(os, static_cast<std::uint32_t>(cfg.input.feature_set));
  put_u32(os, cfg.input.normalize ? 1u : 0u);
  put_u32(os, static_cast<std::uint32_t>(cfg.arch.skip_layer));
  put_u32(os, static_cast<std::uint32_t>(cfg.arch.encoder.size()));
  for (int w : cfg.arch.encoder) put_u32(os, static_cast<std::uint32_t>(w));
  put_u32(os, static_cast<std::uint32_t>(cfg.arch.decoder.size()));
  for (int w : cfg.arch.decoder) put_u32(os, static_cast<std::uint32_t>(w));
  put_u32(os, static_cast<std::uint32_t>(model.params.size()));
  os.write(reinterpret_cast<const char*>(model.params.data()),
           static_cast<std::streamsize>(model.params.size() * sizeof(float)));
  if (!os) throw IoError("checkpoint write failed: " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0) throw IoError("not a checkpoint: " + path.string());
  if (get_u32(is, path) != kModelVersion) throw IoError("unsupported checkpoint version: " + path.string());
  if (get_u32(is, path) != kNumFeatures) throw IoError("checkpoint feature width mismatch: " + path.string());
  Model m;
  m.config.inlier_count = get_u32(is, path);
  m.config.neighbor_count = get_u32(is, path);
  const auto fs = get_u32(is, path);
  if (fs > 2) throw IoError("bad feature set in checkpoint: " + path.string());
  m.config.input.feature_set = static_cast<FeatureSet>(fs);
  m.config.input.normalize = get_u32(is, path) != 0;
  m.config.arch.skip_layer = static_cast<int>(get_u32(is, path));
  auto read_widths = [&](std::vector<int>& v) {
    const auto n = get_u32(is, path);
    if (n == 0 || n > 64) throw IoError("bad layer count in checkpoint: " + path.string());
    v.resize(n);
    for (auto& w : v) w = static_cast<int>(get_u32(is, path));
  };
  read_widths(m.config.arch.encoder);
  read_widths(m.config.arch.decoder);
  ParamLayout layout(m.config.arch);
  const auto count = get_u32(is, path);
  if (count != layout.size()) throw IoError("checkpoint parameter count does not match its widths: " + path.string());
  m.params.resize(count);
  if (!is.read(reinterpret_cast<char*>(m.params.data()), static_cast<std::streamsize>(count * sizeof(float))))
    throw IoError("truncated checkpoint: " + path.string());
  if (is.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes in checkpoint: " + path.string());
  return m;
}

Model load_model(const std::filesystem::path& path, const ModelConfig& expected) {
  Model m = load_model(path);
  if (!(m.config == expected)) throw IoError("checkpoint configuration does not match the requested model: " + path.string());
  return m;
}

}  // namespace lrg
