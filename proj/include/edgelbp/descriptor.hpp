#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "edgelbp/mesh.hpp"
#include "edgelbp/rings.hpp"
#include "edgelbp/scalar_field.hpp"

namespace edgelbp {

struct EdgeLbpParams {
  int samples = 15;  ///< P, samples per ring
  int rings = 5;     ///< N_r
  double r_max = 0.04;
  HMode h_mode = HMode::cielab_l;
  double exponent = 1.0;

  /// Throws std::invalid_argument unless P >= 4, N_r >= 1, R_max > 0, exponent > 0.
  void validate() const;
  std::vector<double> radii() const { return radii_schedule(r_max, rings); }

  friend bool operator==(const EdgeLbpParams&, const EdgeLbpParams&) = default;
};

/// Dense row-major matrix of histogram rows.
class HistogramMatrix {
 public:
  HistogramMatrix() = default;
  HistogramMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const { return data_; }

  friend bool operator==(const HistogramMatrix&, const HistogramMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Descriptor {
  HistogramMatrix matrix;  ///< N_r x (P+1)
  EdgeLbpParams params;
  std::size_t admissible_count = 0;
};

inline constexpr std::size_t kBaselineBins = 16;

enum class BaselineVariant { hist1, hist2 };

struct BaselineHistogram {
  std::array<double, kBaselineBins> bins{};
  BaselineVariant variant = BaselineVariant::hist1;
  HMode h_mode = HMode::cielab_l;
  double exponent = 1.0;

  bool normalized_range() const { return variant == BaselineVariant::hist1; }
  /// Single-row view for the distance functions.
  HistogramMatrix as_matrix() const;
};

/// Thrown when no vertex of the mesh admits the requested rings.
class NoAdmissibleVertices : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of samples strictly greater than the center value.
int edge_lbp_value(double h_center, std::span<const double> h_samples);

/// Per-vertex output of the ring kernel: one code per ring, or a non-admissibility verdict.
struct VertexCodes {
  int rings = 0;
  std::vector<std::int16_t> codes;  ///< vertex-major, `rings` entries per vertex; -1 if skipped
  std::vector<RingStatus> status;

  std::size_t admissible_count() const;
  std::map<RingStatus, std::size_t> status_counts() const;
};

/// Parallel kernel (OpenMP). `threads` <= 0 uses the runtime default.
VertexCodes compute_vertex_codes(const SurfaceMesh& mesh, const ScalarField& field,
                                 const EdgeLbpParams& params, int threads = 0);

/// Single-threaded reference for the same computation.
VertexCodes compute_vertex_codes_serial(const SurfaceMesh& mesh, const ScalarField& field,
                                        const EdgeLbpParams& params);

/// Histogram normalized by the admissible count. Throws NoAdmissibleVertices when there is none.
Descriptor descriptor_from_codes(const VertexCodes& codes, const EdgeLbpParams& params);

/// Scalar field from `params`, ring codes and histogram in one go.
Descriptor compute_descriptor(const SurfaceMesh& mesh, const EdgeLbpParams& params, int threads = 0);
Descriptor compute_descriptor(const SurfaceMesh& mesh, const ScalarField& field,
                              const EdgeLbpParams& params, int threads = 0);

/// Hist1 bins over [min h, max h] of the field; Hist2 over the mode's full range.
BaselineHistogram baseline_histogram(const ScalarField& field, BaselineVariant variant);

// Text formats.
//   edgelbp P N_r R_max h_mode exponent n_v      then N_r rows of P+1 values
//   hist1|hist2 16 h_mode exponent               then one row of 16 values
void write_descriptor(std::ostream& out, const Descriptor& d);
Descriptor read_descriptor(std::istream& in);
void write_baseline(std::ostream& out, const BaselineHistogram& h);
BaselineHistogram read_baseline(std::istream& in);

void save_descriptor(const std::filesystem::path& path, const Descriptor& d);
Descriptor load_descriptor(const std::filesystem::path& path);

}  // namespace edgelbp
