#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace edgelbp {

using Vec3 = Eigen::Vector3d;
using Index = std::uint32_t;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Raised for malformed or unsupported mesh input (bad indices, non-manifold edges, ...).
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vertex-colored polygon mesh with edge/face adjacency.
///
/// Immutable once built. Edges are unique unordered vertex pairs; every edge has one
/// (boundary) or two incident faces. `face_edges(f)[k]` is the edge joining corners k and
/// k+1 of face f.
class SurfaceMesh {
 public:
  SurfaceMesh() = default;

  /// Validates the input and builds adjacency. Throws MeshError on any invariant violation.
  static SurfaceMesh build(std::vector<Vec3> vertices, std::vector<Rgb> colors,
                           std::vector<std::vector<Index>> faces);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t face_count() const { return faces_.size(); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Rgb>& colors() const { return colors_; }
  const Vec3& position(Index v) const { return vertices_[v]; }
  const Rgb& color(Index v) const { return colors_[v]; }

  std::span<const Index> face(Index f) const { return faces_[f]; }
  std::span<const Index> face_edges(Index f) const { return face_edges_[f]; }
  const std::array<Index, 2>& edge(Index e) const { return edges_[e]; }
  std::span<const Index> edge_faces(Index e) const { return edge_faces_[e]; }
  std::span<const Index> vertex_edges(Index v) const { return vertex_edges_[v]; }
  std::span<const Index> vertex_faces(Index v) const { return vertex_faces_[v]; }

  bool is_boundary_edge(Index e) const { return edge_faces_[e].size() == 1; }
  bool is_boundary_vertex(Index v) const { return boundary_vertex_[v] != 0; }
  std::size_t boundary_edge_count() const;

  Index other_vertex(Index e, Index v) const {
    return edges_[e][0] == v ? edges_[e][1] : edges_[e][0];
  }

  const std::vector<std::vector<Index>>& faces() const { return faces_; }

 private:
  std::vector<Vec3> vertices_;
  std::vector<Rgb> colors_;
  std::vector<std::vector<Index>> faces_;
  std::vector<std::vector<Index>> face_edges_;
  std::vector<std::array<Index, 2>> edges_;
  std::vector<std::vector<Index>> edge_faces_;
  std::vector<std::vector<Index>> vertex_edges_;
  std::vector<std::vector<Index>> vertex_faces_;
  std::vector<std::uint8_t> boundary_vertex_;
};

/// Newell normal of a polygon; its length is twice the polygon area.
Vec3 newell_normal(const SurfaceMesh& mesh, Index f);

/// Area-weighted average of incident face normals, normalized.
/// Throws MeshError for an isolated vertex or when all incident faces are degenerate.
Vec3 vertex_normal(const SurfaceMesh& mesh, Index v);

/// Returns a copy with every vertex mapped through `x -> rotation * x + translation`.
SurfaceMesh transformed(const SurfaceMesh& mesh, const Eigen::Matrix3d& rotation,
                        const Vec3& translation);

}  // namespace edgelbp
