#include "lrg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lrg/error.hpp"
#include "lrg/rng.hpp"

namespace lrg {

void RoomConfig::validate() const {
  if (!(spacing > 0.0)) throw ParameterError("spacing must be > 0");
  if (!((extent.array() > 0.0).all())) throw ParameterError("room extent must be positive");
  if (min_objects < 0 || max_objects < min_objects) throw ParameterError("object count range is invalid");
  if (max_objects > 0 && !(boxes || cylinders || spheres)) throw ParameterError("no object shape enabled");
  if (!(min_size > 0.0 && max_size >= min_size)) throw ParameterError("object size range is invalid");
  if (!(min_height > 0.0 && max_height >= min_height)) throw ParameterError("object height range is invalid");
  if (!(color_noise >= 0.0)) throw ParameterError("color noise must be >= 0");
}

namespace {

constexpr double kPi = std::numbers::pi;

struct Builder {
  std::vector<Vec3> pos;
  std::vector<Rgb> col;
  std::vector<std::int32_t> id;
  Rng* rng;
  double noise;

  void add(const Vec3& p, const Vec3& base, std::int32_t instance) {
    Rgb c;
    for (int a = 0; a < 3; ++a) {
      const double v = noise > 0.0 ? rng->normal(base[a], noise) : base[a];
      c[a] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
    pos.push_back(p);
    col.push_back(c);
    id.push_back(instance);
  }
};

int divisions(double length, double spacing) { return std::max(1, static_cast<int>(std::lround(length / spacing))); }

Vec3 random_color(Rng& rng) { return {rng.uniform(30, 225), rng.uniform(30, 225), rng.uniform(30, 225)}; }

// Footprint in the floor plane: axis-aligned rectangle or disc.
struct Footprint {
  Shape shape;
  double cx, cy;
  double hx, hy;  // half extents (radius for both when round)

  bool covers(double x, double y) const {
    if (shape == Shape::box) return std::abs(x - cx) <= hx && std::abs(y - cy) <= hy;
    return std::hypot(x - cx, y - cy) <= hx;
  }
};

bool separated(const Footprint& a, const Footprint& b, double gap) {
  return std::abs(a.cx - b.cx) >= a.hx + b.hx + gap || std::abs(a.cy - b.cy) >= a.hy + b.hy + gap;
}

void sample_box(Builder& out, const Footprint& f, double base, double h, double s, const Vec3& color, std::int32_t id) {
  const double x0 = f.cx - f.hx, y0 = f.cy - f.hy;
  const int nx = divisions(2 * f.hx, s), ny = divisions(2 * f.hy, s), nz = divisions(h, s);
  const double dx = 2 * f.hx / nx, dy = 2 * f.hy / ny, dz = h / nz;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) out.add({x0 + i * dx, y0 + j * dy, base + h}, color, id);
  for (int k = 0; k < nz; ++k) {
    const double z = base + k * dz;
    for (int j = 0; j <= ny; ++j) {
      out.add({x0, y0 + j * dy, z}, color, id);
      out.add({x0 + 2 * f.hx, y0 + j * dy, z}, color, id);
    }
    for (int i = 1; i < nx; ++i) {
      out.add({x0 + i * dx, y0, z}, color, id);
      out.add({x0 + i * dx, y0 + 2 * f.hy, z}, color, id);
    }
  }
}

void sample_ring(Builder& out, double cx, double cy, double r, double z, double s, const Vec3& color, std::int32_t id,
                 double phase) {
  const int m = std::max(3, static_cast<int>(std::lround(2 * kPi * r / s)));
  for (int q = 0; q < m; ++q) {
    const double t = phase + 2 * kPi * q / m;
    out.add({cx + r * std::cos(t), cy + r * std::sin(t), z}, color, id);
  }
}

void sample_cylinder(Builder& out, const Footprint& f, double base, double h, double s, const Vec3& color,
                     std::int32_t id) {
  const double r = f.hx;
  const int nz = divisions(h, s);
  const double dz = h / nz;
  for (int k = 0; k < nz; ++k) sample_ring(out, f.cx, f.cy, r, base + k * dz, s, color, id, 0.0);
  const int nr = divisions(r, s);
  out.add({f.cx, f.cy, base + h}, color, id);
  for (int q = 1; q <= nr; ++q) sample_ring(out, f.cx, f.cy, r * q / nr, base + h, s, color, id, 0.5 * q);
}

void sample_sphere(Builder& out, const Footprint& f, double base, double s, const Vec3& color, std::int32_t id) {
  const double r = f.hx;
  const Vec3 c{f.cx, f.cy, base + r};
  const int n = std::max(12, static_cast<int>(std::lround(4 * kPi * r * r / (s * s))));
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = golden * i;
    out.add(c + r * Vec3(rho * std::cos(t), rho * std::sin(t), z), color, id);
  }
}

}  // namespace

PointCloud generate_room(const RoomConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  const double s = cfg.spacing;
  const double X = cfg.extent.x(), Y = cfg.extent.y(), Z = cfg.extent.z();

  std::vector<Shape> shapes;
  if (cfg.boxes) shapes.push_back(Shape::box);
  if (cfg.cylinders) shapes.push_back(Shape::cylinder);
  if (cfg.spheres) shapes.push_back(Shape::sphere);

  const Vec3 floor_color = random_color(rng), wall_color = random_color(rng);
  const int n_objects = cfg.min_objects + static_cast<int>(rng.index(static_cast<std::size_t>(cfg.max_objects - cfg.min_objects + 1)));

  struct Object {
    Footprint f;
    double height;
    Vec3 color;
  };
  std::vector<Object> objects;
  const double inset = s;
  for (int o = 0; o < n_objects; ++o) {
    const Shape shape = shapes[rng.index(shapes.size())];
    for (int attempt = 0; attempt < 100; ++attempt) {
      Footprint f{shape, 0, 0, 0, 0};
      f.hx = 0.5 * rng.uniform(cfg.min_size, cfg.max_size) * (shape == Shape::box ? 2.0 : 1.0);
      f.hy = shape == Shape::box ? 0.5 * rng.uniform(2 * cfg.min_size, 2 * cfg.max_size) : f.hx;
      const double h = shape == Shape::sphere ? 2 * f.hx : rng.uniform(cfg.min_height, cfg.max_height);
      const double lo_x = f.hx + inset, hi_x = X - f.hx - inset, lo_y = f.hy + inset, hi_y = Y - f.hy - inset;
      if (lo_x > hi_x || lo_y > hi_y || h + s > Z) continue;
      f.cx = rng.uniform(lo_x, hi_x);
      f.cy = rng.uniform(lo_y, hi_y);
      const bool ok = std::all_of(objects.begin(), objects.end(),
                                  [&](const Object& other) { return separated(f, other.f, 3 * s); });
      if (!ok) continue;
      objects.push_back({f, h, random_color(rng)});
      break;
    }
  }

  Builder out{{}, {}, {}, &rng, cfg.color_noise};
  const int nx = divisions(X, s), ny = divisions(Y, s), nz = divisions(Z, s);
  const double dx = X / nx, dy = Y / ny, dz = Z / nz;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) {
      const double x = i * dx, y = j * dy;
      const bool covered = std::any_of(objects.begin(), objects.end(), [&](const Object& o) { return o.f.covers(x, y); });
      if (!covered) out.add({x, y, 0.0}, floor_color, 1);
    }
  for (int k = 1; k <= nz; ++k) {
    const double z = k * dz;
    for (int j = 0; j <= ny; ++j) out.add({0.0, j * dy, z}, wall_color, 2);
    for (int j = 0; j <= ny; ++j) out.add({X, j * dy, z}, wall_color, 3);
    for (int i = 1; i < nx; ++i) out.add({i * dx, 0.0, z}, wall_color, 4);
    for (int i = 1; i < nx; ++i) out.add({i * dx, Y, z}, wall_color, 5);
  }
  std::int32_t id = 6;
  const double base = 0.5 * s;
  for (const auto& o : objects) {
    switch (o.f.shape) {
      case Shape::box: sample_box(out, o.f, base, o.height, s, o.color, id); break;
      case Shape::cylinder: sample_cylinder(out, o.f, base, o.height, s, o.color, id); break;
      case Shape::sphere: sample_sphere(out, o.f, base, s, o.color, id); break;
    }
    ++id;
  }
  return PointCloud(std::move(out.pos), std::move(out.col), std::move(out.id));
}

Split generate_split(const RoomConfig& cfg, int n_train, int n_test, std::uint64_t base_seed) {
  cfg.validate();
  if (n_train < 0 || n_test < 0) throw ParameterError("scene counts must be >= 0");
  if (static_cast<std::uint64_t>(n_train) > kTestSeedOffset) throw ParameterError("too many training scenes");
  Split split;
  split.train.resize(static_cast<std::size_t>(n_train));
  split.test.resize(static_cast<std::size_t>(n_test));
  const int total = n_train + n_test;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < total; ++i) {
    const bool train = i < n_train;
    const int k = train ? i : i - n_train;
    const std::uint64_t seed = base_seed + (train ? 0 : kTestSeedOffset) + static_cast<std::uint64_t>(k);
    auto& slot = train ? split.train[static_cast<std::size_t>(k)] : split.test[static_cast<std::size_t>(k)];
    slot = {seed, generate_room(cfg, seed)};
  }
  return split;
}

namespace {

std::string room_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "room_%04zu.txt", i);
  return buf;
}

}  // namespace

void write_split(const Split& split, const RoomConfig& cfg, std::uint64_t base_seed, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "train");
  fs::create_directories(dir / "test");
  std::ofstream m(dir / "manifest.txt");
  if (!m) throw IoError("cannot write " + (dir / "manifest.txt").string());
  m.precision(12);
  m << "# synthetic rooms\n";
  m << "base_seed = " << base_seed << "\n";
  m << "extent = " << cfg.extent.x() << ' ' << cfg.extent.y() << ' ' << cfg.extent.z() << "\n";
  m << "spacing = " << cfg.spacing << "\n";
  m << "objects = " << cfg.min_objects << ' ' << cfg.max_objects << "\n";
  m << "shapes =" << (cfg.boxes ? " box" : "") << (cfg.cylinders ? " cylinder" : "") << (cfg.spheres ? " sphere" : "")
    << "\n";
  m << "color_noise = " << cfg.color_noise << "\n";
  m << "size = " << cfg.min_size << ' ' << cfg.max_size << "\n";
  m << "height = " << cfg.min_height << ' ' << cfg.max_height << "\n";
  auto emit = [&](const std::vector<SplitScene>& scenes, const char* name) {
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      const fs::path rel = fs::path(name) / room_name(i);
      save_scene(scenes[i].cloud, dir / rel);
      m << "scene " << name << ' ' << rel.generic_string() << ' ' << scenes[i].seed << "\n";
    }
  };
  emit(split.train, "train");
  emit(split.test, "test");
  if (!m) throw IoError("failed writing " + (dir / "manifest.txt").string());
}

std::vector<std::filesystem::path> manifest_scenes(const std::filesystem::path& dir, const std::string& split) {
  const auto path = dir / "manifest.txt";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::filesystem::path> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag, name, rel;
    if (!(ss >> tag) || tag != "scene") continue;
    if (!(ss >> name >> rel)) throw ParseError(path.string(), lineno, "malformed scene entry");
    if (name == split) out.push_back(dir / rel);
  }
  return out;
}

}  // namespace lrg
