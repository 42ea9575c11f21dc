#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgelbp/descriptor.hpp"

namespace edgelbp {

enum class Metric { bhattacharyya, euclidean, emd };

std::string_view to_string(Metric metric);
/// Accepts "bha"/"bhattacharyya", "euc"/"euclidean", "emd".
Metric parse_metric(std::string_view text);

// Matrix-level distances; throw IncompatibleError on shape mismatch.

/// Mean over rows of sqrt(1 - sum_m sqrt(a_m b_m)).
double bhattacharyya_distance(const HistogramMatrix& a, const HistogramMatrix& b);
/// Frobenius norm of a - b.
double euclidean_distance(const HistogramMatrix& a, const HistogramMatrix& b);
/// Mean over rows of the 1-D earth mover's distance with unit bin spacing.
double emd_distance(const HistogramMatrix& a, const HistogramMatrix& b);
double distance(const HistogramMatrix& a, const HistogramMatrix& b, Metric metric);

// Descriptor-level distances additionally require identical parameters.
double bhattacharyya_distance(const Descriptor& a, const Descriptor& b);
double euclidean_distance(const Descriptor& a, const Descriptor& b);
double emd_distance(const Descriptor& a, const Descriptor& b);
double distance(const Descriptor& a, const Descriptor& b, Metric metric);

/// Histogram plus the key two histograms must share to be comparable.
struct Signature {
  std::string label;
  std::string compat_key;
  HistogramMatrix matrix;
};

Signature make_signature(std::string label, const Descriptor& d);
Signature make_signature(std::string label, const BaselineHistogram& h);
/// Reads either a descriptor or a baseline histogram file; the label is the file stem.
Signature load_signature(const std::filesystem::path& path);

struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<double> values;  ///< row-major, size() x size()
  Metric metric = Metric::bhattacharyya;

  std::size_t size() const { return labels.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values[i * labels.size() + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * labels.size() + j]; }
};

/// Pairwise distances, i < j computed in parallel and mirrored. Throws IncompatibleError
/// naming both labels on the first incompatible pair.
DistanceMatrix distance_matrix(std::span<const Signature> items, Metric metric, int threads = 0);
DistanceMatrix distance_matrix_serial(std::span<const Signature> items, Metric metric);
/// Convenience overload labelling descriptors "0", "1", ...
DistanceMatrix distance_matrix(std::span<const Descriptor> descriptors, Metric metric, int threads = 0);

/// First line: comma-separated labels, then the matrix as fixed-decimal CSV.
void write_distance_matrix(std::ostream& out, const DistanceMatrix& m);
DistanceMatrix read_distance_matrix(std::istream& in);
void save_distance_matrix(const std::filesystem::path& path, const DistanceMatrix& m);
DistanceMatrix load_distance_matrix(const std::filesystem::path& path);

}  // namespace edgelbp
