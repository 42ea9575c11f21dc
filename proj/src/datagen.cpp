#include "edgelbp/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "edgelbp/errors.hpp"
#include "edgelbp/mesh_io.hpp"

namespace edgelbp {

namespace {

constexpr double kPi = std::numbers::pi;

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<E, N>& values, std::string_view what) {
  for (E e : values)
    if (to_string(e) == text) return e;
  throw std::invalid_argument(fmt::format("unknown {} '{}'", what, text));
}

// Floored modulo, result in [0, m).
double wrap(double x, double m) {
  const double r = std::fmod(x, m);
  return r < 0.0 ? r + m : r;
}

}  // namespace

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::stripes: return "stripes";
    case PatternKind::checker: return "checker";
    case PatternKind::dots: return "dots";
    case PatternKind::waves: return "waves";
    case PatternKind::zigzag: return "zigzag";
  }
  return "unknown";
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::plane_grid: return "plane_grid";
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::cylinder: return "cylinder";
    case ShapeKind::torus: return "torus";
    case ShapeKind::bumpy_plane: return "bumpy_plane";
  }
  return "unknown";
}

std::string_view to_string(Mapping mapping) {
  switch (mapping) {
    case Mapping::planar: return "planar";
    case Mapping::spherical: return "spherical";
    case Mapping::cylindrical: return "cylindrical";
    case Mapping::toroidal: return "toroidal";
  }
  return "unknown";
}

PatternKind parse_pattern_kind(std::string_view text) {
  return parse_enum(text,
                    std::array{PatternKind::stripes, PatternKind::checker, PatternKind::dots,
                               PatternKind::waves, PatternKind::zigzag},
                    "pattern");
}

ShapeKind parse_shape_kind(std::string_view text) {
  return parse_enum(text,
                    std::array{ShapeKind::plane_grid, ShapeKind::sphere, ShapeKind::cylinder,
                               ShapeKind::torus, ShapeKind::bumpy_plane},
                    "shape");
}

Mapping parse_mapping(std::string_view text) {
  return parse_enum(
      text, std::array{Mapping::planar, Mapping::spherical, Mapping::cylindrical, Mapping::toroidal},
      "mapping");
}

bool pattern_indicator(const PatternSpec& p, double u, double w) {
  const double s = p.scale;
  const double c = std::cos(p.angle), sn = std::sin(p.angle);
  const double x = c * u + sn * w + p.phase;
  w = c * w - sn * u;
  switch (p.kind) {
    case PatternKind::stripes:
      return wrap(x, s) < 0.5 * s;
    case PatternKind::checker: {
      const auto cell = static_cast<long long>(std::floor(x / s)) +
                        static_cast<long long>(std::floor(w / s));
      return cell % 2 == 0;
    }
    case PatternKind::dots: {
      const double dx = x - s * std::round(x / s);
      const double dw = w - s * std::round(w / s);
      return std::hypot(dx, dw) < 0.35 * s;
    }
    case PatternKind::waves:
      return wrap(w + 0.25 * s * std::sin(2.0 * kPi * x / s), s) < 0.5 * s;
    case PatternKind::zigzag: {
      const double tri = 2.0 * std::abs(x / s - std::floor(x / s + 0.5));
      return wrap(w + 0.5 * s * tri, s) < 0.5 * s;
    }
  }
  return false;
}

Mapping default_mapping(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::plane_grid:
    case ShapeKind::bumpy_plane: return Mapping::planar;
    case ShapeKind::sphere: return Mapping::spherical;
    case ShapeKind::cylinder: return Mapping::cylindrical;
    case ShapeKind::torus: return Mapping::toroidal;
  }
  return Mapping::planar;
}

namespace {

using Faces = std::vector<std::vector<Index>>;

void add_quad(Faces& faces, Index a, Index b, Index c, Index d) {
  faces.push_back({a, b, c});
  faces.push_back({a, c, d});
}

SurfaceMesh white_mesh(std::vector<Vec3> positions, Faces faces) {
  std::vector<Rgb> colors(positions.size(), Rgb{255, 255, 255});
  return SurfaceMesh::build(std::move(positions), std::move(colors), std::move(faces));
}

SurfaceMesh make_grid(std::size_t n, double size, const std::function<double(double, double)>& height) {
  std::vector<Vec3> pos;
  pos.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -0.5 * size + size * static_cast<double>(i) / static_cast<double>(n - 1);
      const double y = -0.5 * size + size * static_cast<double>(j) / static_cast<double>(n - 1);
      pos.emplace_back(x, y, height ? height(x, y) : 0.0);
    }
  }
  Faces faces;
  faces.reserve(2 * (n - 1) * (n - 1));
  const auto id = [n](std::size_t i, std::size_t j) { return static_cast<Index>(j * n + i); };
  for (std::size_t j = 0; j + 1 < n; ++j)
    for (std::size_t i = 0; i + 1 < n; ++i)
      add_quad(faces, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  return white_mesh(std::move(pos), std::move(faces));
}

// Cube subdivided into (n-1)^2 cells per face, warped equal-angle and projected on the sphere.
SurfaceMesh make_sphere(std::size_t resolution, double radius) {
  const auto cells = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::lround(std::sqrt((static_cast<double>(resolution) - 2.0) / 6.0))));
  const std::size_t n = cells + 1;
  std::vector<Vec3> pos;
  std::unordered_map<std::uint64_t, Index> lattice;
  const auto vertex = [&](std::array<std::size_t, 3> q) {
    const std::uint64_t key = (q[0] * n + q[1]) * n + q[2];
    auto [it, inserted] = lattice.try_emplace(key, static_cast<Index>(pos.size()));
    if (inserted) {
      Vec3 c;
      for (int a = 0; a < 3; ++a) {
        const double t = -1.0 + 2.0 * static_cast<double>(q[a]) / static_cast<double>(cells);
        c[a] = std::tan(t * kPi / 4.0);
      }
      pos.push_back(radius * c.normalized());
    }
    return it->second;
  };

  // Each face: fixed axis and value, tangent axes (a, b) with a x b pointing outward.
  struct CubeFace {
    int fixed;
    std::size_t value;
    int a;
    int b;
  };
  const std::array<CubeFace, 6> cube = {{{0, cells, 1, 2}, {0, 0, 2, 1}, {1, cells, 2, 0},
                                         {1, 0, 0, 2}, {2, cells, 0, 1}, {2, 0, 1, 0}}};
  Faces faces;
  for (const auto& f : cube) {
    const auto at = [&](std::size_t s, std::size_t t) {
      std::array<std::size_t, 3> q{};
      q[f.fixed] = f.value;
      q[f.a] = s;
      q[f.b] = t;
      return vertex(q);
    };
    for (std::size_t t = 0; t < cells; ++t)
      for (std::size_t s = 0; s < cells; ++s)
        add_quad(faces, at(s, t), at(s + 1, t), at(s + 1, t + 1), at(s, t + 1));
  }
  return white_mesh(std::move(pos), std::move(faces));
}

SurfaceMesh make_cylinder(std::size_t resolution, double height, double radius) {
  const double area = 2.0 * kPi * radius * height + 2.0 * kPi * radius * radius;
  const double spacing = std::sqrt(area / static_cast<double>(resolution));
  const auto around = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(2.0 * kPi * radius / spacing)));
  const auto levels = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(height / spacing)) + 1);
  const auto cap_rings = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(radius / spacing)));

  std::vector<Vec3> pos;
  const auto ring_point = [&](double r, std::size_t t, double z) {
    const double a = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(around);
    return Vec3(r * std::cos(a), r * std::sin(a), z);
  };
  for (std::size_t k = 0; k < levels; ++k) {
    const double z = -0.5 * height + height * static_cast<double>(k) / static_cast<double>(levels - 1);
    for (std::size_t t = 0; t < around; ++t) pos.push_back(ring_point(radius, t, z));
  }
  const auto side = [&](std::size_t t, std::size_t k) {
    return static_cast<Index>(k * around + t % around);
  };
  Faces faces;
  for (std::size_t k = 0; k + 1 < levels; ++k)
    for (std::size_t t = 0; t < around; ++t)
      add_quad(faces, side(t, k), side(t + 1, k), side(t + 1, k + 1), side(t, k + 1));

  for (const bool top : {true, false}) {
    const double z = top ? 0.5 * height : -0.5 * height;
    // ring 0 is the rim shared with the side.
    std::vector<std::vector<Index>> rings(cap_rings);
    for (std::size_t t = 0; t < around; ++t) rings[0].push_back(side(t, top ? levels - 1 : 0));
    for (std::size_t q = 1; q < cap_rings; ++q) {
      const double r = radius * static_cast<double>(cap_rings - q) / static_cast<double>(cap_rings);
      for (std::size_t t = 0; t < around; ++t) {
        rings[q].push_back(static_cast<Index>(pos.size()));
        pos.push_back(ring_point(r, t, z));
      }
    }
    const auto center = static_cast<Index>(pos.size());
    pos.emplace_back(0.0, 0.0, z);
    for (std::size_t q = 0; q < cap_rings; ++q) {
      for (std::size_t t = 0; t < around; ++t) {
        const std::size_t t1 = (t + 1) % around;
        if (q + 1 < cap_rings) {
          if (top) {
            add_quad(faces, rings[q][t], rings[q][t1], rings[q + 1][t1], rings[q + 1][t]);
          } else {
            add_quad(faces, rings[q][t1], rings[q][t], rings[q + 1][t], rings[q + 1][t1]);
          }
        } else if (top) {
          faces.push_back({rings[q][t], rings[q][t1], center});
        } else {
          faces.push_back({rings[q][t1], rings[q][t], center});
        }
      }
    }
  }
  return white_mesh(std::move(pos), std::move(faces));
}

SurfaceMesh make_torus(std::size_t resolution, double major, double minor) {
  const double area = 4.0 * kPi * kPi * major * minor;
  const double spacing = std::sqrt(area / static_cast<double>(resolution));
  const auto nu = std::max<std::size_t>(8, static_cast<std::size_t>(std::lround(2.0 * kPi * major / spacing)));
  const auto nv = std::max<std::size_t>(6, static_cast<std::size_t>(std::lround(2.0 * kPi * minor / spacing)));
  std::vector<Vec3> pos;
  pos.reserve(nu * nv);
  for (std::size_t i = 0; i < nu; ++i) {
    const double u = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(nu);
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(nv);
      const double rho = major + minor * std::cos(v);
      pos.emplace_back(rho * std::cos(u), rho * std::sin(u), minor * std::sin(v));
    }
  }
  const auto id = [&](std::size_t i, std::size_t j) {
    return static_cast<Index>((i % nu) * nv + j % nv);
  };
  Faces faces;
  for (std::size_t i = 0; i < nu; ++i)
    for (std::size_t j = 0; j < nv; ++j)
      add_quad(faces, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
  return white_mesh(std::move(pos), std::move(faces));
}

}  // namespace

SurfaceMesh generate_base_mesh(const ShapeSpec& spec, std::uint64_t seed) {
  if (spec.resolution < 100) throw std::invalid_argument("shape resolution must be at least 100");
  if (!(spec.size > 0.0)) throw std::invalid_argument("shape size must be positive");
  const auto grid_side = std::max<std::size_t>(
      10, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(spec.resolution)))));
  switch (spec.kind) {
    case ShapeKind::plane_grid:
      return make_grid(grid_side, spec.size, nullptr);
    case ShapeKind::bumpy_plane: {
      struct Bump {
        double x, y, amplitude, sigma;
      };
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::vector<Bump> bumps(8);
      for (auto& b : bumps) {
        b.x = (unit(rng) - 0.5) * spec.size;
        b.y = (unit(rng) - 0.5) * spec.size;
        b.amplitude = (unit(rng) - 0.5) * 0.16 * spec.size;
        b.sigma = (0.1 + 0.15 * unit(rng)) * spec.size;
      }
      return make_grid(grid_side, spec.size, [bumps](double x, double y) {
        double z = 0.0;
        for (const auto& b : bumps) {
          const double d2 = (x - b.x) * (x - b.x) + (y - b.y) * (y - b.y);
          z += b.amplitude * std::exp(-d2 / (2.0 * b.sigma * b.sigma));
        }
        return z;
      });
    }
    case ShapeKind::sphere:
      return make_sphere(spec.resolution, 0.5 * spec.size);
    case ShapeKind::cylinder:
      return make_cylinder(spec.resolution, spec.size, 0.25 * spec.size);
    case ShapeKind::torus:
      return make_torus(spec.resolution, 0.35 * spec.size, 0.15 * spec.size);
  }
  throw std::invalid_argument("unknown shape kind");
}

namespace {

// Equal-angle cube projection unfolded as a net: the four faces around z form a strip
// (continuous across their shared edges) and each cap hangs off the +x face.
std::array<double, 2> cube_net_coordinates(const Vec3& p) {
  const double ax = std::abs(p.x()), ay = std::abs(p.y()), az = std::abs(p.z());
  if (az > ax && az > ay) {
    if (p.z() > 0.0) return {std::atan(p.y() / p.z()), 0.5 * kPi - std::atan(p.x() / p.z())};
    return {std::atan(p.y() / -p.z()), -0.5 * kPi + std::atan(p.x() / -p.z())};
  }
  // Rotate the dominant side face onto +x.
  int k = 0;
  double x = p.x(), y = p.y();
  if (ay > ax) {
    k = p.y() > 0.0 ? 1 : 3;
  } else if (p.x() < 0.0) {
    k = 2;
  }
  for (int i = 0; i < k; ++i) {
    const double t = x;
    x = y;
    y = -t;
  }
  return {0.5 * kPi * k + std::atan(y / x), std::atan(p.z() / x)};
}

}  // namespace

SurfaceMesh apply_pattern(const SurfaceMesh& mesh, const PatternSpec& pattern, Mapping mapping) {
  if (!(pattern.scale > 0.0)) throw std::invalid_argument("pattern scale must be positive");
  const auto& pts = mesh.vertices();

  double rho_min = std::numeric_limits<double>::infinity(), rho_max = 0.0;
  double z_min = std::numeric_limits<double>::infinity(), z_max = -z_min;
  for (const auto& p : pts) {
    const double rho = std::hypot(p.x(), p.y());
    rho_min = std::min(rho_min, rho);
    rho_max = std::max(rho_max, rho);
    z_min = std::min(z_min, p.z());
    z_max = std::max(z_max, p.z());
  }
  const double z_mid = 0.5 * (z_min + z_max);

  std::vector<Rgb> colors(pts.size(), pattern.background);
  for (std::size_t v = 0; v < pts.size(); ++v) {
    const Vec3& p = pts[v];
    const double rho = std::hypot(p.x(), p.y());
    const double phi = std::atan2(p.y(), p.x());
    double u = 0.0, w = 0.0;
    switch (mapping) {
      case Mapping::planar:
        u = p.x();
        w = p.y();
        break;
      case Mapping::spherical: {
        const double r = p.norm();
        if (r <= 0.0) continue;  // center
        const auto uw = cube_net_coordinates(p);
        u = r * uw[0];
        w = r * uw[1];
        break;
      }
      case Mapping::cylindrical: {
        if (rho <= 1e-9 * rho_max) continue;  // axis
        u = rho_max * phi;
        const double inset = rho_max - rho;
        // Unroll caps: distance in from the rim continues the height coordinate.
        if (inset <= 1e-6 * rho_max) {
          w = p.z();
        } else {
          w = p.z() > z_mid ? p.z() + inset : p.z() - inset;
        }
        break;
      }
      case Mapping::toroidal: {
        const double major = 0.5 * (rho_max + rho_min);
        const double minor = 0.5 * (rho_max - rho_min);
        u = major * phi;
        w = minor * std::atan2(p.z(), rho - major);
        break;
      }
    }
    if (pattern_indicator(pattern, u, w)) colors[v] = pattern.foreground;
  }
  return SurfaceMesh::build(mesh.vertices(), std::move(colors), mesh.faces());
}

SurfaceMesh subdivide_with_color(const SurfaceMesh& mesh, int steps) {
  if (steps < 1) throw std::invalid_argument("subdivision needs at least one step");
  SurfaceMesh current = mesh;
  for (int step = 0; step < steps; ++step) {
    std::vector<Vec3> pos = current.vertices();
    std::vector<Rgb> colors = current.colors();
    const auto base = static_cast<Index>(pos.size());
    for (Index e = 0; e < current.edge_count(); ++e) {
      const auto [a, b] = current.edge(e);
      pos.push_back(0.5 * (current.position(a) + current.position(b)));
      const Rgb& ca = current.color(a);
      const Rgb& cb = current.color(b);
      const auto mean = [](std::uint8_t x, std::uint8_t y) {
        return static_cast<std::uint8_t>((x + y + 1) / 2);
      };
      colors.push_back({mean(ca.r, cb.r), mean(ca.g, cb.g), mean(ca.b, cb.b)});
    }
    Faces faces;
    faces.reserve(current.face_count() * 4);
    for (Index f = 0; f < current.face_count(); ++f) {
      const auto poly = current.face(f);
      if (poly.size() != 3) throw MeshError("subdivide_with_color requires a triangle mesh");
      const auto fe = current.face_edges(f);
      const Index m01 = base + fe[0], m12 = base + fe[1], m20 = base + fe[2];
      faces.push_back({poly[0], m01, m20});
      faces.push_back({m01, poly[1], m12});
      faces.push_back({m20, m12, poly[2]});
      faces.push_back({m01, m12, m20});
    }
    current = SurfaceMesh::build(std::move(pos), std::move(colors), std::move(faces));
  }
  return current;
}

std::vector<ShapeSpec> default_shapes(std::size_t resolution) {
  return {{ShapeKind::plane_grid, resolution, 2.0},
          {ShapeKind::sphere, resolution, 2.0},
          {ShapeKind::cylinder, resolution, 2.0},
          {ShapeKind::torus, resolution, 2.0},
          {ShapeKind::bumpy_plane, resolution, 2.0}};
}

std::vector<PatternSpec> default_patterns() {
  // Periods are spread apart so that the classes differ in feature size as well as shape.
  const double angle = 0.5;
  PatternSpec stripes{PatternKind::stripes, 0.25, 0.0, angle};
  PatternSpec dots{PatternKind::dots, 0.4, 0.0, angle};
  PatternSpec checker{PatternKind::checker, 0.6, 0.0, angle};
  PatternSpec zigzag{PatternKind::zigzag, 1.0, 0.0, angle};
  return {stripes, dots, checker, zigzag};
}

std::string pattern_class_name(std::size_t pattern_index, const PatternSpec& pattern) {
  return fmt::format("p{}_{}", pattern_index, to_string(pattern.kind));
}

std::string model_name(std::size_t shape_index, const ShapeSpec& shape, std::size_t pattern_index,
                       const PatternSpec& pattern) {
  return fmt::format("s{}_{}__{}", shape_index, to_string(shape.kind),
                     pattern_class_name(pattern_index, pattern));
}

std::vector<DatasetModel> build_cpp_like_models(const std::vector<ShapeSpec>& shapes,
                                                const std::vector<PatternSpec>& patterns,
                                                std::uint64_t seed) {
  if (shapes.size() < 2 || patterns.size() < 2)
    throw std::invalid_argument("dataset needs at least 2 shapes and 2 patterns");
  std::vector<DatasetModel> models;
  models.reserve(shapes.size() * patterns.size());
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const SurfaceMesh base = generate_base_mesh(shapes[s], seed + s);
    for (std::size_t p = 0; p < patterns.size(); ++p) {
      DatasetModel m;
      m.entry.file = model_name(s, shapes[s], p, patterns[p]) + ".ply";
      m.entry.shape = fmt::format("s{}_{}", s, to_string(shapes[s].kind));
      m.entry.pattern_class = pattern_class_name(p, patterns[p]);
      m.mesh = apply_pattern(base, patterns[p], default_mapping(shapes[s].kind));
      models.push_back(std::move(m));
    }
  }
  return models;
}

std::vector<ManifestEntry> build_cpp_like_dataset(const std::vector<ShapeSpec>& shapes,
                                                  const std::vector<PatternSpec>& patterns,
                                                  const std::filesystem::path& out_dir,
                                                  std::uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  std::vector<ManifestEntry> entries;
  for (auto& model : build_cpp_like_models(shapes, patterns, seed)) {
    save_ply(out_dir / model.entry.file, model.mesh);
    entries.push_back(std::move(model.entry));
  }
  write_manifest(out_dir / "manifest.csv", entries);
  return entries;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  std::string buf = "file,shape,pattern_class\n";
  for (const auto& e : entries) buf += fmt::format("{},{},{}\n", e.file, e.shape, e.pattern_class);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << buf;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("manifest: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "file,shape,pattern_class") throw ParseError("manifest: unexpected header '" + line + "'");
  std::vector<ManifestEntry> entries;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    ManifestEntry e;
    if (!std::getline(ls, e.file, ',') || !std::getline(ls, e.shape, ',') ||
        !std::getline(ls, e.pattern_class) || e.pattern_class.empty())
      throw ParseError(fmt::format("manifest: malformed row {}", row));
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace edgelbp
