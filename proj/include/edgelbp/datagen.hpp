#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "edgelbp/mesh.hpp"

namespace edgelbp {

enum class PatternKind { stripes, checker, dots, waves, zigzag };
enum class ShapeKind { plane_grid, sphere, cylinder, torus, bumpy_plane };
/// `spherical` is an equal-angle cube projection unfolded as a net, `toroidal` unrolls a torus
/// along its two angles.
enum class Mapping { planar, spherical, cylindrical, toroidal };

std::string_view to_string(PatternKind kind);
std::string_view to_string(ShapeKind kind);
std::string_view to_string(Mapping mapping);
PatternKind parse_pattern_kind(std::string_view text);
ShapeKind parse_shape_kind(std::string_view text);
Mapping parse_mapping(std::string_view text);

struct PatternSpec {
  PatternKind kind = PatternKind::stripes;
  double scale = 0.4;  ///< period in model units
  double phase = 0.0;  ///< shift along the first parameter coordinate
  double angle = 0.0;  ///< rotation of the pattern in the parameter plane, radians
  Rgb foreground{0, 0, 0};
  Rgb background{255, 255, 255};
};

/// `size` is the side of the planes, the diameter of the sphere, the height of the
/// cylinder (radius size/4) and the outer diameter of the torus.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::sphere;
  std::size_t resolution = 10000;  ///< target vertex count, >= 100
  double size = 2.0;
};

/// Pattern indicator at parameter coordinates (u, w): true means foreground.
bool pattern_indicator(const PatternSpec& pattern, double u, double w);

/// Natural parameterization for each shape kind.
Mapping default_mapping(ShapeKind kind);

/// Uncolored (white) triangle mesh near the requested vertex count. Deterministic per seed;
/// only bumpy_plane consumes the seed.
SurfaceMesh generate_base_mesh(const ShapeSpec& spec, std::uint64_t seed);

/// Sets each vertex to foreground or background. Points where the mapping is singular
/// (the cylinder axis, the sphere center) get the background color.
SurfaceMesh apply_pattern(const SurfaceMesh& mesh, const PatternSpec& pattern, Mapping mapping);

/// Midpoint 1->4 split repeated `steps` times; new vertices take the rounded channel mean.
SurfaceMesh subdivide_with_color(const SurfaceMesh& mesh, int steps = 1);

struct ManifestEntry {
  std::string file;  ///< relative to the manifest directory
  std::string shape;
  std::string pattern_class;
};

/// Default dataset ingredients: five shapes and four pattern classes.
std::vector<ShapeSpec> default_shapes(std::size_t resolution = 10000);
std::vector<PatternSpec> default_patterns();
/// Descriptor radius suited to the default dataset (model size 2).
inline constexpr double kDefaultDatasetRMax = 0.2;

/// Model name used for files and distance-matrix labels.
std::string model_name(std::size_t shape_index, const ShapeSpec& shape, std::size_t pattern_index,
                       const PatternSpec& pattern);
std::string pattern_class_name(std::size_t pattern_index, const PatternSpec& pattern);

/// In-memory variant of the dataset builder: one mesh per (shape, pattern) pair,
/// shape-major order.
struct DatasetModel {
  ManifestEntry entry;
  SurfaceMesh mesh;
};
std::vector<DatasetModel> build_cpp_like_models(const std::vector<ShapeSpec>& shapes,
                                                const std::vector<PatternSpec>& patterns,
                                                std::uint64_t seed);

/// Writes every model as ASCII PLY plus manifest.csv (`file,shape,pattern_class`).
std::vector<ManifestEntry> build_cpp_like_dataset(const std::vector<ShapeSpec>& shapes,
                                                  const std::vector<PatternSpec>& patterns,
                                                  const std::filesystem::path& out_dir,
                                                  std::uint64_t seed);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace edgelbp
