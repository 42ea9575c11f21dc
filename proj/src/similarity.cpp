#include "edgelbp/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

#include "edgelbp/errors.hpp"

namespace edgelbp {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::bhattacharyya: return "bhattacharyya";
    case Metric::euclidean: return "euclidean";
    case Metric::emd: return "emd";
  }
  return "unknown";
}

Metric parse_metric(std::string_view text) {
  if (text == "bha" || text == "bhattacharyya") return Metric::bhattacharyya;
  if (text == "euc" || text == "euclidean") return Metric::euclidean;
  if (text == "emd") return Metric::emd;
  throw std::invalid_argument(fmt::format("unknown metric '{}'", text));
}

namespace {

void require_same_shape(const HistogramMatrix& a, const HistogramMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw IncompatibleError(fmt::format("histogram shapes differ: {}x{} vs {}x{}", a.rows(),
                                        a.cols(), b.rows(), b.cols()));
  if (a.rows() == 0) throw IncompatibleError("empty histogram");
}

void require_same_params(const Descriptor& a, const Descriptor& b) {
  if (!(a.params == b.params)) throw IncompatibleError("descriptor parameters differ");
}

}  // namespace

double bhattacharyya_distance(const HistogramMatrix& a, const HistogramMatrix& b) {
  require_same_shape(a, b);
  double total = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    // 1 - BC written as half the squared Hellinger sum; identical for row-stochastic
    // inputs and exactly zero when the rows match.
    double sq = 0.0;
    for (std::size_t m = 0; m < a.cols(); ++m) {
      const double diff = std::sqrt(a(r, m)) - std::sqrt(b(r, m));
      sq += diff * diff;
    }
    total += std::sqrt(std::clamp(0.5 * sq, 0.0, 1.0));
  }
  return total / static_cast<double>(a.rows());
}

double euclidean_distance(const HistogramMatrix& a, const HistogramMatrix& b) {
  require_same_shape(a, b);
  double sq = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) sq += (da[i] - db[i]) * (da[i] - db[i]);
  return std::sqrt(sq);
}

double emd_distance(const HistogramMatrix& a, const HistogramMatrix& b) {
  require_same_shape(a, b);
  double total = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double cdf_a = 0.0, cdf_b = 0.0, work = 0.0;
    for (std::size_t m = 0; m < a.cols(); ++m) {
      cdf_a += a(r, m);
      cdf_b += b(r, m);
      work += std::abs(cdf_a - cdf_b);
    }
    total += work;
  }
  return total / static_cast<double>(a.rows());
}

double distance(const HistogramMatrix& a, const HistogramMatrix& b, Metric metric) {
  switch (metric) {
    case Metric::bhattacharyya: return bhattacharyya_distance(a, b);
    case Metric::euclidean: return euclidean_distance(a, b);
    case Metric::emd: return emd_distance(a, b);
  }
  return 0.0;
}

double bhattacharyya_distance(const Descriptor& a, const Descriptor& b) {
  require_same_params(a, b);
  return bhattacharyya_distance(a.matrix, b.matrix);
}

double euclidean_distance(const Descriptor& a, const Descriptor& b) {
  require_same_params(a, b);
  return euclidean_distance(a.matrix, b.matrix);
}

double emd_distance(const Descriptor& a, const Descriptor& b) {
  require_same_params(a, b);
  return emd_distance(a.matrix, b.matrix);
}

double distance(const Descriptor& a, const Descriptor& b, Metric metric) {
  require_same_params(a, b);
  return distance(a.matrix, b.matrix, metric);
}

Signature make_signature(std::string label, const Descriptor& d) {
  const auto& p = d.params;
  return {std::move(label),
          fmt::format("edgelbp {} {} {} {} {}", p.samples, p.rings, p.r_max, to_string(p.h_mode),
                      p.exponent),
          d.matrix};
}

Signature make_signature(std::string label, const BaselineHistogram& h) {
  return {std::move(label),
          fmt::format("{} {} {} {}", h.normalized_range() ? "hist1" : "hist2", kBaselineBins,
                      to_string(h.h_mode), h.exponent),
          h.as_matrix()};
}

Signature load_signature(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  const int first = in.peek();
  const auto label = path.stem().string();
  try {
    if (first == 'e') return make_signature(label, read_descriptor(in));
    return make_signature(label, read_baseline(in));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

void check_compatible(std::span<const Signature> items) {
  if (items.size() < 2) throw std::invalid_argument("distance matrix needs at least 2 items");
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i].compat_key != items[0].compat_key ||
        items[i].matrix.rows() != items[0].matrix.rows() ||
        items[i].matrix.cols() != items[0].matrix.cols())
      throw IncompatibleError(fmt::format("'{}' ({}) is incompatible with '{}' ({})", items[i].label,
                                          items[i].compat_key, items[0].label,
                                          items[0].compat_key));
  }
}

DistanceMatrix empty_matrix(std::span<const Signature> items, Metric metric) {
  DistanceMatrix m;
  m.metric = metric;
  for (const auto& s : items) m.labels.push_back(s.label);
  m.values.assign(items.size() * items.size(), 0.0);
  return m;
}

}  // namespace

DistanceMatrix distance_matrix(std::span<const Signature> items, Metric metric, int threads) {
  check_compatible(items);
  DistanceMatrix m = empty_matrix(items, metric);
  const auto n = static_cast<std::int64_t>(items.size());
  const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for num_threads(team) schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      const double d = distance(items[i].matrix, items[j].matrix, metric);
      m(i, j) = d;
      m(j, i) = d;
    }
  }
  return m;
}

DistanceMatrix distance_matrix_serial(std::span<const Signature> items, Metric metric) {
  check_compatible(items);
  DistanceMatrix m = empty_matrix(items, metric);
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      m(i, j) = distance(items[i].matrix, items[j].matrix, metric);
      m(j, i) = m(i, j);
    }
  }
  return m;
}

DistanceMatrix distance_matrix(std::span<const Descriptor> descriptors, Metric metric, int threads) {
  std::vector<Signature> items;
  items.reserve(descriptors.size());
  for (std::size_t i = 0; i < descriptors.size(); ++i)
    items.push_back(make_signature(std::to_string(i), descriptors[i]));
  return distance_matrix(items, metric, threads);
}

void write_distance_matrix(std::ostream& out, const DistanceMatrix& m) {
  std::string buf;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) buf += ',';
    buf += m.labels[i];
  }
  buf += '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) buf += ',';
      buf += fmt::format("{:.12f}", m(i, j));
    }
    buf += '\n';
  }
  out << buf;
}

DistanceMatrix read_distance_matrix(std::istream& in) {
  DistanceMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("distance matrix: empty file");
  {
    std::istringstream ls(line);
    std::string label;
    while (std::getline(ls, label, ',')) {
      if (!label.empty() && label.back() == '\r') label.pop_back();
      m.labels.push_back(label);
    }
  }
  const std::size_t n = m.labels.size();
  if (n == 0) throw ParseError("distance matrix: no labels");
  m.values.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError(fmt::format("distance matrix: missing row {}", i));
    std::istringstream ls(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        const double x = std::stod(cell, &used);
        if (!(x >= 0.0)) throw ParseError("negative distance");
        m.values.push_back(x);
      } catch (const std::logic_error&) {
        throw ParseError(fmt::format("distance matrix: bad value '{}' in row {}", cell, i));
      }
      ++count;
    }
    if (count != n)
      throw ParseError(fmt::format("distance matrix: row {} has {} values, expected {}", i, count, n));
  }
  return m;
}

void save_distance_matrix(const std::filesystem::path& path, const DistanceMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write_distance_matrix(out, m);
}

DistanceMatrix load_distance_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read_distance_matrix(in);
}

}  // namespace edgelbp
