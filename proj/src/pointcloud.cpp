#include "lrg/pointcloud.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "lrg/error.hpp"

namespace lrg {

namespace {

constexpr std::array<Rgb, 64> kPalette = {{
    {242, 36, 36}, {97, 139, 242}, {146, 242, 12}, {242, 73, 221},
    {29, 191, 164}, {191, 139, 77}, {55, 10, 191}, {63, 191, 57},
    {217, 33, 94}, {87, 168, 217}, {200, 217, 11}, {185, 65, 217},
    {25, 166, 95}, {166, 87, 66}, {8, 22, 166}, {93, 166, 50},
    {242, 36, 174}, {97, 237, 242}, {242, 184, 12}, {150, 73, 242},
    {29, 191, 55}, {191, 77, 91}, {10, 86, 191}, {153, 191, 57},
    {216, 33, 217}, {87, 217, 178}, {217, 96, 11}, {83, 65, 217},
    {49, 166, 25}, {166, 66, 112}, {8, 127, 166}, {166, 160, 50},
    {173, 36, 242}, {97, 242, 151}, {242, 30, 12}, {73, 109, 242},
    {111, 191, 29}, {191, 77, 168}, {10, 191, 175}, {191, 140, 57},
    {93, 33, 217}, {87, 217, 91}, {217, 11, 63}, {65, 148, 217},
    {143, 166, 25}, {153, 66, 166}, {8, 166, 99}, {166, 83, 50},
    {36, 38, 242}, {140, 242, 97}, {242, 12, 148}, {73, 222, 242},
    {191, 163, 29}, {138, 77, 191}, {10, 191, 54}, {191, 57, 64},
    {33, 95, 217}, {169, 217, 87}, {217, 11, 201}, {65, 217, 184},
    {166, 94, 25}, {86, 66, 166}, {23, 166, 8}, {166, 50, 94}
}};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  return os;
}

}  // namespace

bool InstanceLabels::complete() const {
  return std::none_of(ids.begin(), ids.end(), [](std::int32_t v) { return v == kUnassigned; });
}

std::int32_t InstanceLabels::max_id() const {
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end());
}

bool InstanceLabels::contiguous() const {
  if (ids.empty()) return false;
  const std::int32_t m = max_id();
  if (m < 1) return false;
  std::vector<char> seen(static_cast<std::size_t>(m) + 1, 0);
  for (auto v : ids) {
    if (v < 1) return false;
    seen[static_cast<std::size_t>(v)] = 1;
  }
  return std::all_of(seen.begin() + 1, seen.end(), [](char c) { return c != 0; });
}

PointCloud::PointCloud(std::vector<Vec3> positions, std::vector<Rgb> colors,
                       std::optional<std::vector<std::int32_t>> gt_instance)
    : positions_(std::move(positions)), colors_(std::move(colors)), gt_(std::move(gt_instance)) {
  if (positions_.empty()) throw ContractError("point cloud must contain at least one point");
  if (colors_.size() != positions_.size()) throw ContractError("colors/positions length mismatch");
  if (gt_ && gt_->size() != positions_.size()) throw ContractError("gt_instance/positions length mismatch");
  if (gt_) {
    for (auto id : *gt_)
      if (id < 1) throw ContractError("ground-truth instance ids must be >= 1");
  }
  bounds_.min = bounds_.max = positions_.front();
  for (const auto& p : positions_) {
    if (!p.allFinite()) throw ContractError("point positions must be finite");
    bounds_.min = bounds_.min.cwiseMin(p);
    bounds_.max = bounds_.max.cwiseMax(p);
  }
}

const std::vector<std::int32_t>& PointCloud::gt_instance() const {
  if (!gt_) throw ContractError("point cloud has no ground-truth instance labels");
  return *gt_;
}

PointCloud load_scene(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open scene: " + path.string());

  std::vector<Vec3> pos;
  std::vector<Rgb> col;
  std::vector<std::int32_t> ids;
  std::size_t columns = 0;
  std::string line;
  std::size_t lineno = 0;
  const std::string name = path.string();

  while (std::getline(is, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    if (toks.size() != 6 && toks.size() != 7)
      throw ParseError(name, lineno, "expected 6 or 7 fields, got " + std::to_string(toks.size()));
    if (columns == 0) columns = toks.size();
    if (toks.size() != columns) throw ParseError(name, lineno, "inconsistent column count");

    Vec3 p;
    for (int k = 0; k < 3; ++k) {
      if (!parse_number(toks[k], p[k]) || !std::isfinite(p[k]))
        throw ParseError(name, lineno, "bad coordinate '" + std::string(toks[k]) + "'");
    }
    Rgb c{};
    for (int k = 0; k < 3; ++k) {
      int v = 0;
      if (!parse_number(toks[3 + k], v) || v < 0 || v > 255)
        throw ParseError(name, lineno, "bad color component '" + std::string(toks[3 + k]) + "'");
      c[k] = static_cast<std::uint8_t>(v);
    }
    if (columns == 7) {
      std::int32_t id = 0;
      if (!parse_number(toks[6], id) || id < 1)
        throw ParseError(name, lineno, "bad instance id '" + std::string(toks[6]) + "'");
      ids.push_back(id);
    }
    pos.push_back(p);
    col.push_back(c);
  }
  if (pos.empty()) throw ParseError(name, lineno, "empty scene");

  std::optional<std::vector<std::int32_t>> gt;
  if (columns == 7) gt = std::move(ids);
  return PointCloud(std::move(pos), std::move(col), std::move(gt));
}

void save_scene(const PointCloud& cloud, const std::filesystem::path& path) {
  auto os = open_out(path);
  const bool labeled = cloud.has_labels();
  char buf[160];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    const auto& c = cloud.color(i);
    int n = labeled ? std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d %d %d %d\n", p.x(), p.y(), p.z(), c[0], c[1],
                                    c[2], cloud.gt_instance()[i])
                    : std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d %d %d\n", p.x(), p.y(), p.z(), c[0], c[1], c[2]);
    os.write(buf, n);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

InstanceLabels load_labels(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open labels: " + path.string());
  InstanceLabels out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks.front().front() == '#') continue;
    std::int32_t v = 0;
    if (toks.size() != 1 || !parse_number(toks[0], v) || v < 0) throw ParseError(path.string(), lineno, "bad label");
    out.ids.push_back(v);
  }
  return out;
}

void save_labels(const InstanceLabels& labels, const std::filesystem::path& path) {
  auto os = open_out(path);
  for (auto v : labels.ids) os << v << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

Rgb palette_color(std::int32_t instance_id) {
  const auto m = static_cast<std::size_t>(((instance_id - 1) % 64 + 64) % 64);
  return kPalette[m];
}

void export_colored_ply(const PointCloud& cloud, const InstanceLabels& labels, const std::filesystem::path& path) {
  if (labels.size() != cloud.size()) throw ContractError("labels/cloud length mismatch");
  if (!labels.complete()) throw ContractError("cannot export incomplete labels (found unassigned points)");
  auto os = open_out(path);
  os << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
     << "\nproperty float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  char buf[128];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.position(i);
    const auto c = palette_color(labels[i]);
    int n = std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f %d %d %d\n", p.x(), p.y(), p.z(), c[0], c[1], c[2]);
    os.write(buf, n);
  }
  if (!os) throw IoError("write failed: " + path.string());
}

}  // namespace lrg
