#include "lrg/dataset.hpp"

#include <bit>
#include <cstring>

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include "lrg/error.hpp"

namespace lrg {

static_assert(std::endian::native == std::endian::little, "dataset format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'L', 'R', 'G', 'D'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 6 * 4;

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(const unsigned char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

}  // namespace

std::size_t dataset_record_bytes(const DatasetHeader& h) {
  const std::size_t i = h.inlier_count, j = h.neighbor_count, f = h.num_features;
  return 4 + 12 + (i + j) * f * sizeof(float) + i + j;
}

DatasetWriter::DatasetWriter(const std::filesystem::path& path, const DatasetHeader& header)
    : path_(path), header_(header), os_(path, std::ios::binary) {
  if (!os_) throw IoError("cannot open dataset for writing: " + path.string());
  if (header.inlier_count == 0 || header.neighbor_count == 0 || header.num_features != kNumFeatures)
    throw ParameterError("invalid dataset header");
  os_.write(kMagic, 4);
  put<std::uint32_t>(os_, kVersion);
  put<std::uint32_t>(os_, header.inlier_count);
  put<std::uint32_t>(os_, header.neighbor_count);
  put<std::uint32_t>(os_, header.num_features);
  put<std::uint32_t>(os_, static_cast<std::uint32_t>(header.feature_set));
  put<std::uint32_t>(os_, header.normalized ? 1u : 0u);
}

void DatasetWriter::write(const TrainingSample& s) {
  const auto I = static_cast<Eigen::Index>(header_.inlier_count);
  const auto J = static_cast<Eigen::Index>(header_.neighbor_count);
  if (s.inliers.rows() != I || s.neighbors.rows() != J || s.remove_target.size() != header_.inlier_count ||
      s.add_target.size() != header_.neighbor_count)
    throw ContractError("training sample shape does not match dataset header");
  put<std::uint32_t>(os_, static_cast<std::uint32_t>(dataset_record_bytes(header_) - 4));
  put<std::uint32_t>(os_, s.meta.scene);
  put<std::int32_t>(os_, s.meta.instance);
  put<std::uint32_t>(os_, s.meta.step);
  os_.write(reinterpret_cast<const char*>(s.inliers.data()), static_cast<std::streamsize>(I * kNumFeatures * sizeof(float)));
  os_.write(reinterpret_cast<const char*>(s.neighbors.data()), static_cast<std::streamsize>(J * kNumFeatures * sizeof(float)));
  os_.write(reinterpret_cast<const char*>(s.remove_target.data()), I);
  os_.write(reinterpret_cast<const char*>(s.add_target.data()), J);
  if (!os_) throw IoError("dataset write failed: " + path_.string());
  ++count_;
}

void DatasetWriter::close() {
  os_.close();
  if (!os_) throw IoError("dataset close failed: " + path_.string());
}

DatasetReader::DatasetReader(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) throw IoError("cannot open dataset: " + path.string());
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw IoError("cannot stat dataset: " + path.string());
  }
  length_ = static_cast<std::size_t>(st.st_size);
  if (length_ < kHeaderBytes) {
    ::close(fd);
    throw IoError("dataset file too short: " + path.string());
  }
  void* m = ::mmap(nullptr, length_, PROT_READ, MAP_PRIVATE, fd, 0);
  ::close(fd);
  if (m == MAP_FAILED) throw IoError("cannot map dataset: " + path.string());
  data_ = static_cast<const unsigned char*>(m);

  auto fail = [&](const std::string& why) {
    ::munmap(const_cast<unsigned char*>(data_), length_);
    data_ = nullptr;
    throw IoError(why + ": " + path.string());
  };
  if (std::memcmp(data_, kMagic, 4) != 0) fail("not a dataset file");
  if (get<std::uint32_t>(data_ + 4) != kVersion) fail("unsupported dataset version");
  header_.inlier_count = get<std::uint32_t>(data_ + 8);
  header_.neighbor_count = get<std::uint32_t>(data_ + 12);
  header_.num_features = get<std::uint32_t>(data_ + 16);
  const auto fs = get<std::uint32_t>(data_ + 20);
  if (fs > 2) fail("bad feature set in dataset header");
  header_.feature_set = static_cast<FeatureSet>(fs);
  header_.normalized = get<std::uint32_t>(data_ + 24) != 0;
  if (header_.num_features != kNumFeatures || header_.inlier_count == 0 || header_.neighbor_count == 0)
    fail("bad dataset shape");
  header_bytes_ = kHeaderBytes;
  record_bytes_ = dataset_record_bytes(header_);
  if ((length_ - header_bytes_) % record_bytes_ != 0) fail("truncated dataset");
  count_ = (length_ - header_bytes_) / record_bytes_;
}

DatasetReader::~DatasetReader() {
  if (data_) ::munmap(const_cast<unsigned char*>(data_), length_);
}

TrainingSample DatasetReader::read(std::size_t i) const {
  if (i >= count_) throw ContractError("dataset index out of range");
  const unsigned char* p = data_ + header_bytes_ + i * record_bytes_;
  if (get<std::uint32_t>(p) != record_bytes_ - 4) throw IoError("corrupt dataset record");
  const auto I = static_cast<Eigen::Index>(header_.inlier_count);
  const auto J = static_cast<Eigen::Index>(header_.neighbor_count);
  TrainingSample s;
  s.meta.scene = get<std::uint32_t>(p + 4);
  s.meta.instance = get<std::int32_t>(p + 8);
  s.meta.step = get<std::uint32_t>(p + 12);
  p += 16;
  s.inliers.resize(I, kNumFeatures);
  s.neighbors.resize(J, kNumFeatures);
  std::memcpy(s.inliers.data(), p, static_cast<std::size_t>(I) * kNumFeatures * sizeof(float));
  p += static_cast<std::size_t>(I) * kNumFeatures * sizeof(float);
  std::memcpy(s.neighbors.data(), p, static_cast<std::size_t>(J) * kNumFeatures * sizeof(float));
  p += static_cast<std::size_t>(J) * kNumFeatures * sizeof(float);
  s.remove_target.assign(p, p + I);
  p += I;
  s.add_target.assign(p, p + J);
  return s;
}

}  // namespace lrg
