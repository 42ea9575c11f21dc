#pragma once

#include <filesystem>
#include <iosfwd>

#include "edgelbp/mesh.hpp"

namespace edgelbp {

enum class MeshFormat { ply, obj };

/// Chooses the format from the file extension (.ply / .obj, case-insensitive).
MeshFormat format_from_path(const std::filesystem::path& path);

/// Loads a vertex-colored mesh. Throws MeshError on parse failure, missing colors,
/// out-of-range indices, non-manifold edges or an empty mesh.
SurfaceMesh load_mesh(const std::filesystem::path& path, MeshFormat format);
SurfaceMesh load_mesh(const std::filesystem::path& path);

SurfaceMesh read_ply(std::istream& in);
SurfaceMesh read_obj(std::istream& in);

/// ASCII PLY with float x,y,z and uchar red,green,blue. Output is byte-deterministic.
void write_ply(std::ostream& out, const SurfaceMesh& mesh);
void save_ply(const std::filesystem::path& path, const SurfaceMesh& mesh);

}  // namespace edgelbp
