#include "edgelbp/mesh.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

namespace edgelbp {

namespace {

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (std::uint64_t{a} << 32) | b;
}

}  // namespace

SurfaceMesh SurfaceMesh::build(std::vector<Vec3> vertices, std::vector<Rgb> colors,
                               std::vector<std::vector<Index>> faces) {
  if (vertices.empty() || faces.empty()) throw MeshError("empty mesh");
  if (colors.size() != vertices.size())
    throw MeshError(fmt::format("color count {} does not match vertex count {}", colors.size(),
                                vertices.size()));

  SurfaceMesh m;
  m.vertices_ = std::move(vertices);
  m.colors_ = std::move(colors);
  m.faces_ = std::move(faces);

  const auto nv = m.vertices_.size();
  m.vertex_edges_.resize(nv);
  m.vertex_faces_.resize(nv);
  m.face_edges_.resize(m.faces_.size());

  std::unordered_map<std::uint64_t, Index> edge_ids;
  edge_ids.reserve(m.faces_.size() * 2);

  for (Index f = 0; f < m.faces_.size(); ++f) {
    const auto& poly = m.faces_[f];
    if (poly.size() < 3) throw MeshError(fmt::format("face {} has fewer than 3 vertices", f));
    for (Index v : poly) {
      if (v >= nv)
        throw MeshError(fmt::format("face {} references vertex {} beyond vertex count {}", f, v, nv));
    }
    auto& fe = m.face_edges_[f];
    fe.reserve(poly.size());
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Index a = poly[k];
      const Index b = poly[(k + 1) % poly.size()];
      if (a == b) throw MeshError(fmt::format("face {} repeats vertex {}", f, a));
      if (m.vertices_[a] == m.vertices_[b])
        throw MeshError(fmt::format("zero-length edge ({}, {}) in face {}", a, b, f));
      auto [it, inserted] = edge_ids.try_emplace(edge_key(a, b), static_cast<Index>(m.edges_.size()));
      if (inserted) {
        m.edges_.push_back({std::min(a, b), std::max(a, b)});
        m.edge_faces_.emplace_back();
        m.vertex_edges_[a].push_back(it->second);
        m.vertex_edges_[b].push_back(it->second);
      }
      auto& incident = m.edge_faces_[it->second];
      if (std::find(incident.begin(), incident.end(), f) != incident.end())
        throw MeshError(fmt::format("face {} uses edge {} twice", f, it->second));
      incident.push_back(f);
      if (incident.size() > 2)
        throw MeshError(fmt::format("non-manifold edge {} ({}, {}) has more than 2 faces",
                                    it->second, m.edges_[it->second][0], m.edges_[it->second][1]));
      fe.push_back(it->second);
    }
    for (Index v : poly) m.vertex_faces_[v].push_back(f);
  }

  m.boundary_vertex_.assign(nv, 0);
  for (Index e = 0; e < m.edges_.size(); ++e) {
    if (m.edge_faces_[e].size() == 1) {
      m.boundary_vertex_[m.edges_[e][0]] = 1;
      m.boundary_vertex_[m.edges_[e][1]] = 1;
    }
  }
  return m;
}

std::size_t SurfaceMesh::boundary_edge_count() const {
  return static_cast<std::size_t>(std::count_if(edge_faces_.begin(), edge_faces_.end(),
                                                [](const auto& f) { return f.size() == 1; }));
}

Vec3 newell_normal(const SurfaceMesh& mesh, Index f) {
  const auto poly = mesh.face(f);
  Vec3 n = Vec3::Zero();
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec3& a = mesh.position(poly[k]);
    const Vec3& b = mesh.position(poly[(k + 1) % poly.size()]);
    n.x() += (a.y() - b.y()) * (a.z() + b.z());
    n.y() += (a.z() - b.z()) * (a.x() + b.x());
    n.z() += (a.x() - b.x()) * (a.y() + b.y());
  }
  return n;
}

Vec3 vertex_normal(const SurfaceMesh& mesh, Index v) {
  const auto faces = mesh.vertex_faces(v);
  if (faces.empty()) throw MeshError(fmt::format("vertex {} has no incident face", v));
  Vec3 sum = Vec3::Zero();
  for (Index f : faces) sum += newell_normal(mesh, f);
  const double len = sum.norm();
  if (!(len > 0.0)) throw MeshError(fmt::format("vertex {} has a degenerate normal", v));
  return sum / len;
}

SurfaceMesh transformed(const SurfaceMesh& mesh, const Eigen::Matrix3d& rotation,
                        const Vec3& translation) {
  std::vector<Vec3> moved;
  moved.reserve(mesh.vertex_count());
  for (const auto& p : mesh.vertices()) moved.push_back(rotation * p + translation);
  return SurfaceMesh::build(std::move(moved), mesh.colors(), mesh.faces());
}

}  // namespace edgelbp
