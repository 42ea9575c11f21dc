#include "edgelbp/rings.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>

#include <fmt/format.h>

namespace edgelbp {

std::string_view to_string(RingStatus status) {
  switch (status) {
    case RingStatus::admissible: return "admissible";
    case RingStatus::boundary_contact: return "boundary contact";
    case RingStatus::multiple_curves: return "multiple curves";
    case RingStatus::open_curve: return "open curve";
    case RingStatus::not_simply_connected: return "not simply connected";
    case RingStatus::no_intersection: return "no intersection";
    case RingStatus::degenerate_ring: return "degenerate ring";
  }
  return "unknown";
}

namespace {

// Parameter of the sphere crossing on the segment from `inner` toward `outer`, measured
// from `inner`. Assumes |inner - center| <= R < |outer - center|.
double crossing_parameter(const Vec3& inner, const Vec3& outer, const Vec3& center, double radius) {
  const Vec3 d = outer - inner;
  const Vec3 m = inner - center;
  const double a = d.squaredNorm();
  const double b = 2.0 * m.dot(d);
  const double c = m.squaredNorm() - radius * radius;
  if (c >= 0.0) return 0.0;  // inner end already on the sphere
  const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * a * c));
  // Larger root, written to avoid cancellation.
  const double t = b >= 0.0 ? (-2.0 * c) / (b + disc) : (-b + disc) / (2.0 * a);
  return std::clamp(t, 0.0, 1.0);
}

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kDistanceTieTolerance * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::optional<SphereHit> edge_sphere_intersection(const Vec3& a, const Vec3& b, const Vec3& center,
                                                  double radius) {
  const bool a_in = inside_sphere((a - center).norm(), radius);
  const bool b_in = inside_sphere((b - center).norm(), radius);
  if (a_in && b_in) return std::nullopt;
  if (!a_in && !b_in)
    throw RingError("edge_sphere_intersection: both endpoints outside the sphere");
  if (a_in) {
    const double t = crossing_parameter(a, b, center, radius);
    return SphereHit{a + t * (b - a), t};
  }
  const double s = crossing_parameter(b, a, center, radius);
  return SphereHit{b + s * (a - b), 1.0 - s};
}

std::vector<double> radii_schedule(double r_max, int ring_count) {
  if (!(r_max > 0.0) || ring_count < 1)
    throw std::invalid_argument("radii_schedule: need R_max > 0 and at least one ring");
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(ring_count));
  for (int n = 1; n < ring_count; ++n) radii.push_back(n * r_max / ring_count);
  radii.push_back(r_max);
  return radii;
}

double projected_signed_area(const RingCurve& curve, const Vec3& normal, const Vec3& center) {
  const auto& pts = curve.points;
  double twice = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec3 p = pts[i] - center;
    const Vec3 q = pts[(i + 1) % pts.size()] - center;
    twice += p.cross(q).dot(normal);
  }
  return 0.5 * twice;
}

namespace {

void reverse_keep_first(RingCurve& curve) {
  if (curve.points.size() < 3) return;
  std::reverse(curve.points.begin() + 1, curve.points.end());
  std::reverse(curve.h_values.begin() + 1, curve.h_values.end());
  std::reverse(curve.source_edges.begin() + 1, curve.source_edges.end());
}

}  // namespace

RingCurve orient_ring(RingCurve curve, const Vec3& normal, const Vec3& center) {
  if (!curve.closed || curve.points.size() < 3)
    throw RingError("orient_ring: need a closed curve with at least 3 points");
  double radius = 0.0;
  for (const auto& p : curve.points) radius = std::max(radius, (p - center).norm());
  const double area = projected_signed_area(curve, normal, center);
  if (std::abs(area) < 1e-12 * radius * radius)
    throw RingError("orient_ring: degenerate projection");
  if (area < 0.0) reverse_keep_first(curve);
  return curve;
}

std::size_t select_start_point(const RingCurve& curve) {
  const auto& h = curve.h_values;
  if (h.empty()) throw RingError("select_start_point: empty curve");
  const double h_max = *std::max_element(h.begin(), h.end());

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (h_max - h[i] <= kMaxTieTolerance) candidates.push_back(i);
  if (candidates.empty()) throw RingError("select_start_point: non-finite h values");
  if (candidates.size() == 1) return candidates.front();

  std::size_t best = candidates.front();
  double best_sum = -1.0;
  for (std::size_t i : candidates) {
    double sum = 0.0;
    for (const auto& q : curve.points) sum += (curve.points[i] - q).norm();
    if (sum > best_sum && !nearly_equal(sum, best_sum)) {
      best = i;
      best_sum = sum;
    }
  }
  return best;
}

std::size_t align_inner_start(const RingCurve& curve, const Vec3& target) {
  if (curve.points.empty()) throw RingError("align_inner_start: empty curve");
  std::size_t best = 0;
  double best_dist = (curve.points[0] - target).norm();
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double d = (curve.points[i] - target).norm();
    if (d < best_dist && !nearly_equal(d, best_dist)) {
      best = i;
      best_dist = d;
    }
  }
  return best;
}

RingSamples resample_ring(const RingCurve& curve, std::size_t start, int sample_count,
                          double radius) {
  const std::size_t k = curve.points.size();
  if (sample_count < 4) throw std::invalid_argument("resample_ring: need at least 4 samples");
  if (k < 2 || start >= k) throw RingError("resample_ring: invalid curve or start index");

  // Segment i goes from point (start+i) to (start+i+1), cyclically.
  std::vector<double> cumulative(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& a = curve.points[(start + i) % k];
    const auto& b = curve.points[(start + i + 1) % k];
    cumulative[i + 1] = cumulative[i] + (b - a).norm();
  }
  const double total = cumulative[k];
  if (total < 1e-9 * radius) throw RingError("resample_ring: degenerate ring length");

  RingSamples out;
  out.start_point = curve.points[start];
  out.samples.reserve(static_cast<std::size_t>(sample_count));
  out.h_samples.reserve(static_cast<std::size_t>(sample_count));
  std::size_t seg = 0;
  for (int j = 0; j < sample_count; ++j) {
    const double target = total * j / sample_count;
    while (seg + 1 < k && cumulative[seg + 1] <= target) ++seg;
    // Skip zero-length segments so interpolation stays well-defined.
    while (seg + 1 < k && cumulative[seg + 1] - cumulative[seg] <= 0.0) ++seg;
    const std::size_t ia = (start + seg) % k;
    const std::size_t ib = (start + seg + 1) % k;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double u = len > 0.0 ? std::clamp((target - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
    out.samples.push_back(curve.points[ia] + u * (curve.points[ib] - curve.points[ia]));
    out.h_samples.push_back(curve.h_values[ia] + u * (curve.h_values[ib] - curve.h_values[ia]));
  }
  return out;
}

RingExtractor::RingExtractor(const SurfaceMesh& mesh, const ScalarField& field)
    : mesh_(mesh),
      field_(field),
      reach_(mesh.vertex_count(), 0.0),
      vertex_stamp_(mesh.vertex_count(), 0),
      edge_stamp_(mesh.edge_count(), 0),
      edge_point_stamp_(mesh.edge_count(), 0),
      edge_point_(mesh.edge_count(), 0),
      face_stamp_(mesh.face_count(), 0) {
  if (field.size() != mesh.vertex_count())
    throw std::invalid_argument("scalar field size does not match the mesh");
}

void RingExtractor::grow(Index v, double radius) {
  if (++stamp_ == 0) {
    std::fill(vertex_stamp_.begin(), vertex_stamp_.end(), 0);
    std::fill(edge_stamp_.begin(), edge_stamp_.end(), 0);
    stamp_ = 1;
  }
  region_.clear();
  const Vec3& c = mesh_.position(v);

  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  reach_[v] = 0.0;
  vertex_stamp_[v] = stamp_;
  queue.emplace(0.0, v);
  while (!queue.empty()) {
    const auto [reach, u] = queue.top();
    queue.pop();
    if (reach != reach_[u]) continue;
    region_.push_back(u);
    for (Index e : mesh_.vertex_edges(u)) {
      if (edge_stamp_[e] == stamp_) continue;
      edge_stamp_[e] = stamp_;
      const Index w = mesh_.other_vertex(e, u);
      const double d = (mesh_.position(w) - c).norm();
      if (!inside_sphere(d, radius)) continue;
      const double through = std::max(reach, d);
      if (vertex_stamp_[w] != stamp_ || through < reach_[w]) {
        vertex_stamp_[w] = stamp_;
        reach_[w] = through;
        queue.emplace(through, w);
      }
    }
  }
}

RingStatus RingExtractor::build_curve(Index v, double radius, RingCurve& out) {
  if (++point_stamp_ == 0) {
    std::fill(edge_point_stamp_.begin(), edge_point_stamp_.end(), 0);
    std::fill(face_stamp_.begin(), face_stamp_.end(), 0);
    point_stamp_ = 1;
  }
  const auto in = [&](Index u) {
    return vertex_stamp_[u] == stamp_ && inside_sphere(reach_[u], radius);
  };

  long long euler = 0;
  auto& crossing = crossing_;
  auto& touched_faces = touched_faces_;
  crossing.clear();
  touched_faces.clear();
  // The region is in pop order, so reach is non-decreasing along it.
  for (Index u : region_) {
    if (!in(u)) break;
    if (mesh_.is_boundary_vertex(u)) return RingStatus::boundary_contact;
    ++euler;
    for (Index e : mesh_.vertex_edges(u)) {
      const Index w = mesh_.other_vertex(e, u);
      if (in(w)) {
        if (u < w) --euler;
      } else {
        crossing.push_back(e);
      }
    }
    for (Index f : mesh_.vertex_faces(u)) {
      if (face_stamp_[f] == point_stamp_) continue;
      face_stamp_[f] = point_stamp_;
      touched_faces.push_back(f);
    }
  }
  if (crossing.empty()) return RingStatus::no_intersection;

  // Point ids follow edge ids so the curve layout depends only on connectivity.
  std::sort(crossing.begin(), crossing.end());
  const Vec3& c = mesh_.position(v);
  const std::size_t k = crossing.size();
  auto& points = points_;
  auto& hs = hs_;
  points.resize(k);
  hs.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const Index e = crossing[i];
    edge_point_stamp_[e] = point_stamp_;
    edge_point_[e] = static_cast<std::uint32_t>(i);
    Index a = mesh_.edge(e)[0];
    Index b = mesh_.edge(e)[1];
    if (!in(a)) std::swap(a, b);
    const double t = crossing_parameter(mesh_.position(a), mesh_.position(b), c, radius);
    points[i] = mesh_.position(a) + t * (mesh_.position(b) - mesh_.position(a));
    hs[i] = field_[a] + t * (field_[b] - field_[a]);
  }

  auto& links = links_;
  links.assign(k, {-1, -1});
  const auto link = [&](std::uint32_t p, std::uint32_t q) {
    for (std::uint32_t x : {p, q}) {
      auto& slot = links[x];
      const std::uint32_t other = x == p ? q : p;
      if (slot[0] < 0) {
        slot[0] = other;
      } else if (slot[1] < 0) {
        slot[1] = other;
      } else {
        throw RingError(fmt::format("ring walk: crossing on edge {} joins more than two faces",
                                    crossing[x]));
      }
    }
  };

  auto& corner_in = corner_in_;
  for (Index f : touched_faces) {
    const auto poly = mesh_.face(f);
    const auto fe = mesh_.face_edges(f);
    const std::size_t n = poly.size();
    corner_in.assign(n, 0);
    bool all_in = true;
    for (std::size_t j = 0; j < n; ++j) {
      corner_in[j] = in(poly[j]) ? 1 : 0;
      all_in = all_in && corner_in[j];
    }
    if (all_in) {
      ++euler;
      continue;
    }
    // Pair each exit from the region with the next re-entry walking around the face.
    for (std::size_t j = 0; j < n; ++j) {
      if (!(corner_in[j] && !corner_in[(j + 1) % n])) continue;
      std::size_t m = (j + 1) % n;
      while (!(!corner_in[m] && corner_in[(m + 1) % n])) m = (m + 1) % n;
      const Index exit_edge = fe[j];
      const Index entry_edge = fe[m];
      if (edge_point_stamp_[exit_edge] != point_stamp_ ||
          edge_point_stamp_[entry_edge] != point_stamp_)
        throw RingError(fmt::format("ring walk: face {} crossing without a ring point", f));
      link(edge_point_[exit_edge], edge_point_[entry_edge]);
    }
  }

  for (const auto& l : links)
    if (l[0] < 0 || l[1] < 0) return RingStatus::open_curve;

  out.points.clear();
  out.h_values.clear();
  out.source_edges.clear();
  auto& visited = visited_;
  visited.assign(k, 0);
  std::size_t cur = 0;
  while (true) {
    visited[cur] = 1;
    out.points.push_back(points[cur]);
    out.h_values.push_back(hs[cur]);
    out.source_edges.push_back(crossing[cur]);
    const auto next0 = static_cast<std::size_t>(links[cur][0]);
    const auto next1 = static_cast<std::size_t>(links[cur][1]);
    if (!visited[next0]) {
      cur = next0;
    } else if (!visited[next1]) {
      cur = next1;
    } else {
      break;
    }
  }
  out.closed = true;
  if (out.points.size() != k) return RingStatus::multiple_curves;
  if (euler != 1) return RingStatus::not_simply_connected;
  return RingStatus::admissible;
}

VertexRingSet RingExtractor::extract(Index v, std::span<const double> radii, int sample_count,
                                     bool keep_curves) {
  if (radii.empty()) throw std::invalid_argument("extract: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
      throw std::invalid_argument("extract: radii must be positive and strictly increasing");
  }
  if (v >= mesh_.vertex_count()) throw std::out_of_range("extract: vertex index out of range");

  VertexRingSet set;
  set.center = v;
  set.radii.assign(radii.begin(), radii.end());

  grow(v, radii.back());
  const std::size_t nr = radii.size();
  std::vector<RingCurve> curves(nr);
  // Outer ring first: the most common failure is the largest sphere reaching the border.
  for (std::size_t l = nr; l-- > 0;) {
    const RingStatus status = build_curve(v, radii[l], curves[l]);
    if (status != RingStatus::admissible) {
      set.status = status;
      set.failed_ring = l;
      return set;
    }
  }

  const Vec3& center = mesh_.position(v);
  try {
    const Vec3 normal = vertex_normal(mesh_, v);
    for (auto& curve : curves) curve = orient_ring(std::move(curve), normal, center);
    const std::size_t outer_start = select_start_point(curves.back());
    const Vec3 anchor = curves.back().points[outer_start];
    set.rings.resize(nr);
    for (std::size_t l = 0; l < nr; ++l) {
      const std::size_t start = l + 1 == nr ? outer_start : align_inner_start(curves[l], anchor);
      set.rings[l] = resample_ring(curves[l], start, sample_count, radii[l]);
    }
  } catch (const RingError&) {
    set.rings.clear();
    set.status = RingStatus::degenerate_ring;
    return set;
  } catch (const MeshError&) {
    set.rings.clear();
    set.status = RingStatus::degenerate_ring;
    return set;
  }
  if (keep_curves) set.curves = std::move(curves);
  return set;
}

std::optional<Vec3> RingExtractor::start_point(Index v, double radius) {
  grow(v, radius);
  RingCurve curve;
  if (build_curve(v, radius, curve) != RingStatus::admissible) return std::nullopt;
  try {
    curve = orient_ring(std::move(curve), vertex_normal(mesh_, v), mesh_.position(v));
  } catch (const RingError&) {
    return std::nullopt;
  } catch (const MeshError&) {
    return std::nullopt;
  }
  return curve.points[select_start_point(curve)];
}

VertexRingSet extract_rings(const SurfaceMesh& mesh, const ScalarField& field, Index v,
                            std::span<const double> radii, int sample_count, bool keep_curves) {
  RingExtractor extractor(mesh, field);
  return extractor.extract(v, radii, sample_count, keep_curves);
}

std::vector<StartVector> start_field(const SurfaceMesh& mesh, const ScalarField& field,
                                     double radius) {
  RingExtractor extractor(mesh, field);
  std::vector<StartVector> out;
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    if (auto p = extractor.start_point(v, radius)) out.push_back({v, *p - mesh.position(v)});
  }
  return out;
}

void start_field_export(const SurfaceMesh& mesh, const ScalarField& field, double radius,
                        const std::filesystem::path& out) {
  const auto vectors = start_field(mesh, field, radius);
  std::string buf;
  for (const auto& sv : vectors)
    buf += fmt::format("{} {:.9f} {:.9f} {:.9f}\n", sv.vertex, sv.offset.x(), sv.offset.y(),
                       sv.offset.z());
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error(fmt::format("cannot write '{}'", out.string()));
  file << buf;
  if (!file) throw std::runtime_error(fmt::format("write failed for '{}'", out.string()));
}

}  // namespace edgelbp
