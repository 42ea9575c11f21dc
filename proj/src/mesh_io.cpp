#include "edgelbp/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>

namespace edgelbp {

namespace {

enum class PlyType { int8, uint8, int16, uint16, int32, uint32, float32, float64 };

PlyType parse_ply_type(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::int8;
  if (name == "uchar" || name == "uint8") return PlyType::uint8;
  if (name == "short" || name == "int16") return PlyType::int16;
  if (name == "ushort" || name == "uint16") return PlyType::uint16;
  if (name == "int" || name == "int32") return PlyType::int32;
  if (name == "uint" || name == "uint32") return PlyType::uint32;
  if (name == "float" || name == "float32") return PlyType::float32;
  if (name == "double" || name == "float64") return PlyType::float64;
  throw MeshError(fmt::format("ply: unknown property type '{}'", name));
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::float32;
  bool is_list = false;
  PlyType count_type = PlyType::uint8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

template <typename T>
T read_le(std::istream& in) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw MeshError("ply: unexpected end of binary data");
  return value;
}

double read_binary_scalar(std::istream& in, PlyType t) {
  switch (t) {
    case PlyType::int8: return read_le<std::int8_t>(in);
    case PlyType::uint8: return read_le<std::uint8_t>(in);
    case PlyType::int16: return read_le<std::int16_t>(in);
    case PlyType::uint16: return read_le<std::uint16_t>(in);
    case PlyType::int32: return read_le<std::int32_t>(in);
    case PlyType::uint32: return read_le<std::uint32_t>(in);
    case PlyType::float32: return read_le<float>(in);
    case PlyType::float64: return read_le<double>(in);
  }
  return 0.0;
}

double read_ascii_scalar(std::istream& in) {
  double value = 0.0;
  if (!(in >> value)) throw MeshError("ply: malformed ascii value");
  return value;
}

// Reads one element record; scalar values are returned in property order, the list
// (if any) separately. Only one list property per element is kept.
struct PlyRecord {
  std::vector<double> scalars;
  std::vector<double> list;
};

void read_record(std::istream& in, const PlyElement& el, bool binary, PlyRecord& rec) {
  rec.scalars.clear();
  rec.list.clear();
  for (const auto& prop : el.properties) {
    if (prop.is_list) {
      const double n = binary ? read_binary_scalar(in, prop.count_type) : read_ascii_scalar(in);
      if (n < 0 || n > 1e6) throw MeshError("ply: invalid list length");
      const auto count = static_cast<std::size_t>(n);
      for (std::size_t i = 0; i < count; ++i)
        rec.list.push_back(binary ? read_binary_scalar(in, prop.type) : read_ascii_scalar(in));
    } else {
      rec.scalars.push_back(binary ? read_binary_scalar(in, prop.type) : read_ascii_scalar(in));
    }
  }
}

std::optional<std::size_t> scalar_slot(const PlyElement& el, const std::string& name) {
  std::size_t slot = 0;
  for (const auto& prop : el.properties) {
    if (prop.is_list) continue;
    if (prop.name == name) return slot;
    ++slot;
  }
  return std::nullopt;
}

std::uint8_t to_channel(double v) {
  if (v < 0.0 || v > 255.0) throw MeshError(fmt::format("color channel {} out of range", v));
  return static_cast<std::uint8_t>(v);
}

std::uint8_t unit_to_channel(double v) {
  if (v < 0.0 || v > 1.0) throw MeshError(fmt::format("obj color {} outside [0,1]", v));
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".ply") return MeshFormat::ply;
  if (ext == ".obj") return MeshFormat::obj;
  throw MeshError(fmt::format("unrecognized mesh extension '{}'", ext));
}

SurfaceMesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw MeshError("ply: missing magic");

  bool binary = false;
  bool have_format = false;
  std::vector<PlyElement> elements;
  while (true) {
    if (!std::getline(in, line)) throw MeshError("ply: unterminated header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    if (keyword == "end_header") break;
    if (keyword == "comment" || keyword == "obj_info" || keyword.empty()) continue;
    if (keyword == "format") {
      std::string fmt_name;
      ls >> fmt_name;
      if (fmt_name == "ascii") {
        binary = false;
      } else if (fmt_name == "binary_little_endian") {
        binary = true;
      } else {
        throw MeshError(fmt::format("ply: unsupported format '{}'", fmt_name));
      }
      have_format = true;
    } else if (keyword == "element") {
      PlyElement el;
      if (!(ls >> el.name >> el.count)) throw MeshError("ply: malformed element line");
      elements.push_back(std::move(el));
    } else if (keyword == "property") {
      if (elements.empty()) throw MeshError("ply: property before element");
      PlyProperty prop;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type >> prop.name;
        prop.is_list = true;
        prop.count_type = parse_ply_type(count_type);
        prop.type = parse_ply_type(item_type);
      } else {
        prop.type = parse_ply_type(type);
        ls >> prop.name;
      }
      if (prop.name.empty()) throw MeshError("ply: property without name");
      elements.back().properties.push_back(prop);
    } else {
      throw MeshError(fmt::format("ply: unexpected header keyword '{}'", keyword));
    }
  }
  if (!have_format) throw MeshError("ply: missing format line");

  std::vector<Vec3> positions;
  std::vector<Rgb> colors;
  std::vector<std::vector<Index>> faces;
  bool saw_vertices = false;

  PlyRecord rec;
  for (const auto& el : elements) {
    if (el.name == "vertex") {
      saw_vertices = true;
      const auto x = scalar_slot(el, "x"), y = scalar_slot(el, "y"), z = scalar_slot(el, "z");
      if (!x || !y || !z) throw MeshError("ply: vertex element lacks x/y/z");
      const auto r = scalar_slot(el, "red"), g = scalar_slot(el, "green"),
                 b = scalar_slot(el, "blue");
      if (!r || !g || !b) throw MeshError("ply: vertex colors (red/green/blue) missing");
      positions.reserve(el.count);
      colors.reserve(el.count);
      for (std::size_t i = 0; i < el.count; ++i) {
        read_record(in, el, binary, rec);
        positions.emplace_back(rec.scalars[*x], rec.scalars[*y], rec.scalars[*z]);
        colors.push_back({to_channel(rec.scalars[*r]), to_channel(rec.scalars[*g]),
                          to_channel(rec.scalars[*b])});
      }
    } else if (el.name == "face") {
      const bool has_list = std::any_of(el.properties.begin(), el.properties.end(),
                                        [](const auto& p) { return p.is_list; });
      if (!has_list) throw MeshError("ply: face element lacks an index list");
      faces.reserve(el.count);
      for (std::size_t i = 0; i < el.count; ++i) {
        read_record(in, el, binary, rec);
        std::vector<Index> poly;
        poly.reserve(rec.list.size());
        for (double idx : rec.list) {
          if (idx < 0) throw MeshError(fmt::format("ply: negative vertex index in face {}", i));
          poly.push_back(static_cast<Index>(idx));
        }
        faces.push_back(std::move(poly));
      }
    } else {
      for (std::size_t i = 0; i < el.count; ++i) read_record(in, el, binary, rec);
    }
  }
  if (!saw_vertices) throw MeshError("ply: no vertex element");
  return SurfaceMesh::build(std::move(positions), std::move(colors), std::move(faces));
}

SurfaceMesh read_obj(std::istream& in) {
  std::vector<Vec3> positions;
  std::vector<Rgb> colors;
  std::vector<std::vector<Index>> faces;
  bool any_uncolored = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) throw MeshError(fmt::format("obj:{}: malformed vertex", line_no));
      positions.emplace_back(x, y, z);
      double r, g, b;
      if (ls >> r >> g >> b) {
        colors.push_back({unit_to_channel(r), unit_to_channel(g), unit_to_channel(b)});
      } else {
        any_uncolored = true;
        colors.push_back({});
      }
    } else if (tag == "f") {
      std::vector<Index> poly;
      std::string token;
      while (ls >> token) {
        const auto slash = token.find('/');
        long idx = 0;
        try {
          idx = std::stol(token.substr(0, slash));
        } catch (const std::exception&) {
          throw MeshError(fmt::format("obj:{}: malformed face index '{}'", line_no, token));
        }
        if (idx < 0) idx = static_cast<long>(positions.size()) + idx + 1;
        if (idx <= 0) throw MeshError(fmt::format("obj:{}: invalid face index", line_no));
        poly.push_back(static_cast<Index>(idx - 1));
      }
      faces.push_back(std::move(poly));
    }
  }
  if (any_uncolored) throw MeshError("obj: vertex colors missing");
  return SurfaceMesh::build(std::move(positions), std::move(colors), std::move(faces));
}

SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError(fmt::format("cannot open '{}'", path.string()));
  try {
    return format == MeshFormat::ply ? read_ply(in) : read_obj(in);
  } catch (const MeshError& e) {
    throw MeshError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

SurfaceMesh load_mesh(const std::filesystem::path& path) {
  return load_mesh(path, format_from_path(path));
}

void write_ply(std::ostream& out, const SurfaceMesh& mesh) {
  std::string buf;
  buf += fmt::format(
      "ply\nformat ascii 1.0\nelement vertex {}\nproperty float x\nproperty float y\n"
      "property float z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
      "element face {}\nproperty list uchar int vertex_indices\nend_header\n",
      mesh.vertex_count(), mesh.face_count());
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    const auto& p = mesh.position(v);
    const auto& c = mesh.color(v);
    buf += fmt::format("{} {} {} {} {} {}\n", static_cast<float>(p.x()), static_cast<float>(p.y()),
                       static_cast<float>(p.z()), c.r, c.g, c.b);
  }
  for (const auto& poly : mesh.faces()) {
    buf += fmt::format("{}", poly.size());
    for (Index v : poly) buf += fmt::format(" {}", v);
    buf += '\n';
  }
  out << buf;
}

void save_ply(const std::filesystem::path& path, const SurfaceMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write_ply(out, mesh);
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace edgelbp
