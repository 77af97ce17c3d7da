#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "lrg/pointcloud.hpp"

namespace testing {

namespace fs = std::filesystem;

// Removed with its contents on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "lrg") {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const fs::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary) << s;
}

// nx x ny grid in the plane z = z0 with spacing s, offset (x0, y0).
inline void add_grid(std::vector<lrg::Vec3>& pts, int nx, int ny, double s, double x0 = 0, double y0 = 0,
                     double z0 = 0) {
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) pts.emplace_back(x0 + i * s, y0 + j * s, z0);
}

inline lrg::PointCloud make_cloud(std::vector<lrg::Vec3> pts, std::vector<std::int32_t> ids = {},
                                  lrg::Rgb color = {128, 128, 128}) {
  std::vector<lrg::Rgb> colors(pts.size(), color);
  if (ids.empty()) return lrg::PointCloud(std::move(pts), std::move(colors));
  return lrg::PointCloud(std::move(pts), std::move(colors), std::move(ids));
}

}  // namespace testing
