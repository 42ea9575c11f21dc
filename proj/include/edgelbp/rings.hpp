#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "edgelbp/mesh.hpp"
#include "edgelbp/scalar_field.hpp"

namespace edgelbp {

/// Raised by ring operations on inputs they cannot handle (degenerate curves, corrupted
/// adjacency). Non-admissibility of a vertex is reported through RingStatus instead.
class RingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative tolerance under which a vertex lying on the sphere counts as inside.
inline constexpr double kOnSphereTolerance = 1e-12;
/// Absolute tolerance for treating two h values as tied maxima.
inline constexpr double kMaxTieTolerance = 1e-9;
/// Relative tolerance for ties among distances used in start-point selection.
inline constexpr double kDistanceTieTolerance = 1e-9;

inline bool inside_sphere(double distance, double radius) {
  return distance <= radius * (1.0 + kOnSphereTolerance);
}

/// Closed (or open) polyline cut from the mesh by a sphere around a vertex.
struct RingCurve {
  std::vector<Vec3> points;
  std::vector<double> h_values;
  std::vector<Index> source_edges;
  bool closed = false;

  std::size_t size() const { return points.size(); }
};

/// P equidistant samples along a ring, starting at the selected start point.
struct RingSamples {
  std::vector<Vec3> samples;
  std::vector<double> h_samples;
  Vec3 start_point = Vec3::Zero();
};

enum class RingStatus : std::uint8_t {
  admissible,
  boundary_contact,
  multiple_curves,
  open_curve,
  not_simply_connected,
  no_intersection,
  degenerate_ring,
};

std::string_view to_string(RingStatus status);

struct VertexRingSet {
  Index center = 0;
  std::vector<double> radii;
  std::vector<RingSamples> rings;
  /// Oriented curves, one per radius; only filled when requested.
  std::vector<RingCurve> curves;
  RingStatus status = RingStatus::admissible;
  /// Index into `radii` of the ring that failed, when not admissible.
  std::size_t failed_ring = 0;

  bool admissible() const { return status == RingStatus::admissible; }
};

struct SphereHit {
  Vec3 point;
  double t = 0.0;  ///< parameter along [a, b]
};

/// Crossing of segment [a, b] with the sphere (center, radius).
/// Returns nullopt when the whole segment is inside; throws RingError when both ends are outside.
std::optional<SphereHit> edge_sphere_intersection(const Vec3& a, const Vec3& b, const Vec3& center,
                                                  double radius);

/// [R/N, 2R/N, ..., R].
std::vector<double> radii_schedule(double r_max, int ring_count);

/// Signed area of the curve projected on the plane through `center` with normal `normal`.
double projected_signed_area(const RingCurve& curve, const Vec3& normal, const Vec3& center);

/// Orders the curve counter-clockwise around `normal`, keeping the first point in place.
/// Throws RingError when the projected area is below 1e-12 R^2.
RingCurve orient_ring(RingCurve curve, const Vec3& normal, const Vec3& center);

/// Index of the max-h point; ties go to the largest sum of distances to all other points,
/// then to the smallest index.
std::size_t select_start_point(const RingCurve& curve);

/// Index of the point closest to `target` (smallest index on ties).
std::size_t align_inner_start(const RingCurve& curve, const Vec3& target);

/// Exactly `sample_count` arc-length-equidistant samples beginning at point `start`.
/// Throws RingError if the polyline length is below 1e-9 * radius.
RingSamples resample_ring(const RingCurve& curve, std::size_t start, int sample_count, double radius);

/// Extracts the nested rings around vertices of one mesh.
///
/// Holds per-mesh scratch buffers so repeated calls touch only the grown region. Not
/// thread-safe; use one extractor per worker.
class RingExtractor {
 public:
  RingExtractor(const SurfaceMesh& mesh, const ScalarField& field);

  /// Grows the region around `v` once for the largest radius and harvests every ring.
  /// `radii` must be strictly increasing and positive.
  VertexRingSet extract(Index v, std::span<const double> radii, int sample_count,
                        bool keep_curves = false);

  /// Start point of the single ring of radius R around v, or nullopt if not admissible.
  std::optional<Vec3> start_point(Index v, double radius);

 private:
  RingStatus build_curve(Index v, double radius, RingCurve& out);
  void grow(Index v, double radius);

  const SurfaceMesh& mesh_;
  const ScalarField& field_;

  // Bottleneck distance from the center: the smallest possible maximum distance along
  // an edge path to the vertex. A vertex lies in the ring-r region iff it is <= r.
  std::vector<double> reach_;
  std::vector<std::uint32_t> vertex_stamp_;
  std::vector<std::uint32_t> edge_stamp_;
  std::vector<std::uint32_t> edge_point_stamp_;
  std::vector<std::uint32_t> edge_point_;
  std::vector<std::uint32_t> face_stamp_;
  std::uint32_t stamp_ = 0;
  std::uint32_t point_stamp_ = 0;
  std::vector<Index> region_;

  // build_curve scratch, reused across calls.
  std::vector<Index> crossing_;
  std::vector<Index> touched_faces_;
  std::vector<Vec3> points_;
  std::vector<double> hs_;
  std::vector<std::array<std::int64_t, 2>> links_;
  std::vector<std::uint8_t> visited_;
  std::vector<std::uint8_t> corner_in_;
};

/// Convenience wrapper around RingExtractor for a single vertex.
VertexRingSet extract_rings(const SurfaceMesh& mesh, const ScalarField& field, Index v,
                            std::span<const double> radii, int sample_count,
                            bool keep_curves = false);

struct StartVector {
  Index vertex = 0;
  Vec3 offset = Vec3::Zero();
};

/// p~ - v for every admissible vertex at ring radius R.
std::vector<StartVector> start_field(const SurfaceMesh& mesh, const ScalarField& field, double radius);

/// Writes `vertex_id dx dy dz` lines for every admissible vertex.
void start_field_export(const SurfaceMesh& mesh, const ScalarField& field, double radius,
                        const std::filesystem::path& out);

}  // namespace edgelbp
