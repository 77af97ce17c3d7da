#pragma once

// Hand-written mask predictors for exercising the grower without a trained model.

#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <tuple>

#include "lrg/grower.hpp"
#include "lrg/rng.hpp"

namespace stubs {

using lrg::FeatureSet;
using lrg::InputOptions;
using lrg::MaskPrediction;
using lrg::NetworkInputs;

class Constant : public lrg::MaskPredictor {
 public:
  Constant(float remove, float add, std::size_t i = 16, std::size_t j = 16) : remove_(remove), add_(add), i_(i), j_(j) {}
  std::size_t inlier_count() const override { return i_; }
  std::size_t neighbor_count() const override { return j_; }
  InputOptions input_options() const override { return {FeatureSet::full, false}; }
  MaskPrediction<float> predict(const NetworkInputs<float>& in) const override {
    return {lrg::kernels::Vec<float>::Constant(in.inliers.rows(), remove_),
            lrg::kernels::Vec<float>::Constant(in.neighbors.rows(), add_)};
  }

 private:
  float remove_, add_;
  std::size_t i_, j_;
};

inline Constant always_add(std::size_t i = 16, std::size_t j = 16) { return {0.0f, 1.0f, i, j}; }
// Votes every inlier out while still admitting neighbors, so the region churns.
inline Constant always_remove(std::size_t i = 16, std::size_t j = 16) { return {1.0f, 1.0f, i, j}; }

// Alternates between admitting everything and expelling everything.
class Oscillator : public lrg::MaskPredictor {
 public:
  std::size_t inlier_count() const override { return 16; }
  std::size_t neighbor_count() const override { return 16; }
  InputOptions input_options() const override { return {FeatureSet::full, false}; }
  MaskPrediction<float> predict(const NetworkInputs<float>& in) const override {
    const bool odd = calls_.fetch_add(1) % 2 == 1;
    return {lrg::kernels::Vec<float>::Constant(in.inliers.rows(), odd ? 1.0f : 0.0f),
            lrg::kernels::Vec<float>::Constant(in.neighbors.rows(), 1.0f)};
  }

 private:
  mutable std::atomic<long> calls_{0};
};

// Pseudo-random probabilities that are a pure function of each input row.
class Hashed : public lrg::MaskPredictor {
 public:
  explicit Hashed(std::uint64_t salt = 0) : salt_(salt) {}
  std::size_t inlier_count() const override { return 16; }
  std::size_t neighbor_count() const override { return 16; }
  InputOptions input_options() const override { return {FeatureSet::full, false}; }
  MaskPrediction<float> predict(const NetworkInputs<float>& in) const override {
    return {column(in.inliers, 1), column(in.neighbors, 2)};
  }

 private:
  lrg::kernels::Vec<float> column(const lrg::FeatureRows<float>& rows, std::uint64_t tag) const {
    lrg::kernels::Vec<float> v(rows.rows());
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      std::uint64_t h = salt_ ^ tag;
      for (int c = 0; c < 6; ++c) {
        std::uint32_t bits;
        const float x = rows(r, c);
        std::memcpy(&bits, &x, 4);
        h = lrg::mix64(h ^ bits);
      }
      v[r] = static_cast<float>((h >> 11) * 0x1.0p-53);
    }
    return v;
  }
  std::uint64_t salt_;
};

// Perfect predictor for scenes where every instance has its own color: the region's
// color is the most common inlier color.
class ColorOracle : public lrg::MaskPredictor {
 public:
  explicit ColorOracle(std::size_t i = 32, std::size_t j = 32) : i_(i), j_(j) {}
  std::size_t inlier_count() const override { return i_; }
  std::size_t neighbor_count() const override { return j_; }
  InputOptions input_options() const override { return {FeatureSet::full, false}; }
  MaskPrediction<float> predict(const NetworkInputs<float>& in) const override {
    std::map<std::tuple<float, float, float>, int> count;
    for (Eigen::Index r = 0; r < in.inliers.rows(); ++r) ++count[key(in.inliers, r)];
    auto mode = count.begin()->first;
    for (const auto& [k, n] : count)
      if (n > count[mode]) mode = k;
    MaskPrediction<float> out{lrg::kernels::Vec<float>(in.inliers.rows()), lrg::kernels::Vec<float>(in.neighbors.rows())};
    for (Eigen::Index r = 0; r < in.inliers.rows(); ++r) out.remove_prob[r] = key(in.inliers, r) == mode ? 0.0f : 1.0f;
    for (Eigen::Index r = 0; r < in.neighbors.rows(); ++r) out.add_prob[r] = key(in.neighbors, r) == mode ? 1.0f : 0.0f;
    return out;
  }

 private:
  static std::tuple<float, float, float> key(const lrg::FeatureRows<float>& m, Eigen::Index r) {
    return {m(r, lrg::col::kRgb), m(r, lrg::col::kRgb + 1), m(r, lrg::col::kRgb + 2)};
  }
  std::size_t i_, j_;
};

}  // namespace stubs
