#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "lrg/features.hpp"

namespace lrg {

struct SampleMeta {
  std::uint32_t scene = 0;
  std::int32_t instance = 0;
  std::uint32_t step = 0;

  bool operator==(const SampleMeta&) const = default;
};

struct TrainingSample {
  FeatureRows<float> inliers;    // I x 13, normalized
  FeatureRows<float> neighbors;  // J x 13, normalized
  std::vector<std::uint8_t> remove_target;  // I
  std::vector<std::uint8_t> add_target;     // J
  SampleMeta meta;
};

struct DatasetHeader {
  std::uint32_t inlier_count = 0;
  std::uint32_t neighbor_count = 0;
  std::uint32_t num_features = kNumFeatures;
  FeatureSet feature_set = FeatureSet::full;
  bool normalized = true;

  bool operator==(const DatasetHeader&) const = default;
};

// Binary dataset: header {magic "LRGD", version, I, J, F, feature set, normalized}
// followed by fixed-size records
//   u32 payload_bytes | u32 scene | i32 instance | u32 step |
//   I*F f32 | J*F f32 | I u8 | J u8
// all little-endian.
class DatasetWriter {
 public:
  DatasetWriter(const std::filesystem::path& path, const DatasetHeader& header);

  void write(const TrainingSample& s);
  std::size_t count() const { return count_; }
  void close();

 private:
  std::filesystem::path path_;
  DatasetHeader header_;
  std::ofstream os_;
  std::size_t count_ = 0;
};

// Memory-mapped random-access reader.
class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& path);
  ~DatasetReader();
  DatasetReader(const DatasetReader&) = delete;
  DatasetReader& operator=(const DatasetReader&) = delete;

  const DatasetHeader& header() const { return header_; }
  std::size_t size() const { return count_; }
  TrainingSample read(std::size_t i) const;

 private:
  DatasetHeader header_;
  const unsigned char* data_ = nullptr;
  std::size_t length_ = 0;
  std::size_t header_bytes_ = 0;
  std::size_t record_bytes_ = 0;
  std::size_t count_ = 0;
};

std::size_t dataset_record_bytes(const DatasetHeader& h);

}  // namespace lrg
