#include "edgelbp/descriptor.hpp"
#include "edgelbp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <omp.h>

namespace edgelbp {

void EdgeLbpParams::validate() const {
  if (samples < 4) throw std::invalid_argument("P must be at least 4");
  if (rings < 1) throw std::invalid_argument("N_r must be at least 1");
  if (!(r_max > 0.0)) throw std::invalid_argument("R_max must be positive");
  if (!(exponent > 0.0)) throw std::invalid_argument("exponent must be positive");
}

HistogramMatrix BaselineHistogram::as_matrix() const {
  HistogramMatrix m(1, kBaselineBins);
  std::copy(bins.begin(), bins.end(), m.row(0).begin());
  return m;
}

int edge_lbp_value(double h_center, std::span<const double> h_samples) {
  return static_cast<int>(
      std::count_if(h_samples.begin(), h_samples.end(), [&](double h) { return h_center < h; }));
}

std::size_t VertexCodes::admissible_count() const {
  return static_cast<std::size_t>(
      std::count(status.begin(), status.end(), RingStatus::admissible));
}

std::map<RingStatus, std::size_t> VertexCodes::status_counts() const {
  std::map<RingStatus, std::size_t> counts;
  for (auto s : status) ++counts[s];
  return counts;
}

namespace {

void encode_vertex(RingExtractor& extractor, const ScalarField& field, Index v,
                   std::span<const double> radii, int samples, VertexCodes& out) {
  const auto set = extractor.extract(v, radii, samples);
  out.status[v] = set.status;
  auto* codes = out.codes.data() + static_cast<std::size_t>(v) * radii.size();
  if (!set.admissible()) {
    std::fill(codes, codes + radii.size(), std::int16_t{-1});
    return;
  }
  for (std::size_t n = 0; n < radii.size(); ++n)
    codes[n] = static_cast<std::int16_t>(edge_lbp_value(field[v], set.rings[n].h_samples));
}

VertexCodes make_codes(const SurfaceMesh& mesh, const EdgeLbpParams& params) {
  VertexCodes out;
  out.rings = params.rings;
  out.codes.assign(mesh.vertex_count() * static_cast<std::size_t>(params.rings), -1);
  out.status.assign(mesh.vertex_count(), RingStatus::admissible);
  return out;
}

}  // namespace

VertexCodes compute_vertex_codes(const SurfaceMesh& mesh, const ScalarField& field,
                                 const EdgeLbpParams& params, int threads) {
  params.validate();
  const auto radii = params.radii();
  VertexCodes out = make_codes(mesh, params);
  const auto n = static_cast<std::int64_t>(mesh.vertex_count());
  const int team = threads > 0 ? threads : omp_get_max_threads();

  std::exception_ptr failure;
#pragma omp parallel num_threads(team)
  {
    RingExtractor extractor(mesh, field);
#pragma omp for schedule(dynamic, 256)
    for (std::int64_t v = 0; v < n; ++v) {
      try {
        encode_vertex(extractor, field, static_cast<Index>(v), radii, params.samples, out);
      } catch (...) {
#pragma omp critical(edgelbp_codes_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

VertexCodes compute_vertex_codes_serial(const SurfaceMesh& mesh, const ScalarField& field,
                                        const EdgeLbpParams& params) {
  params.validate();
  const auto radii = params.radii();
  VertexCodes out = make_codes(mesh, params);
  RingExtractor extractor(mesh, field);
  for (Index v = 0; v < mesh.vertex_count(); ++v)
    encode_vertex(extractor, field, v, radii, params.samples, out);
  return out;
}

Descriptor descriptor_from_codes(const VertexCodes& codes, const EdgeLbpParams& params) {
  const auto nr = static_cast<std::size_t>(params.rings);
  const auto cols = static_cast<std::size_t>(params.samples) + 1;
  std::vector<std::size_t> counts(nr * cols, 0);
  std::size_t admissible = 0;
  for (std::size_t v = 0; v < codes.status.size(); ++v) {
    if (codes.status[v] != RingStatus::admissible) continue;
    ++admissible;
    for (std::size_t r = 0; r < nr; ++r) ++counts[r * cols + codes.codes[v * nr + r]];
  }
  if (admissible == 0)
    throw NoAdmissibleVertices(
        fmt::format("no admissible vertices (R_max {} too large for the mesh?)", params.r_max));

  Descriptor d;
  d.params = params;
  d.admissible_count = admissible;
  d.matrix = HistogramMatrix(nr, cols);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      d.matrix(r, c) = static_cast<double>(counts[r * cols + c]) / static_cast<double>(admissible);
  return d;
}

Descriptor compute_descriptor(const SurfaceMesh& mesh, const ScalarField& field,
                              const EdgeLbpParams& params, int threads) {
  return descriptor_from_codes(compute_vertex_codes(mesh, field, params, threads), params);
}

Descriptor compute_descriptor(const SurfaceMesh& mesh, const EdgeLbpParams& params, int threads) {
  params.validate();
  const auto field = compute_scalar_field(mesh, params.h_mode, params.exponent);
  return compute_descriptor(mesh, field, params, threads);
}

BaselineHistogram baseline_histogram(const ScalarField& field, BaselineVariant variant) {
  if (field.values.empty()) throw std::invalid_argument("baseline_histogram: empty field");
  BaselineHistogram hist;
  hist.variant = variant;
  hist.h_mode = field.mode;
  hist.exponent = field.exponent;

  double lo = 0.0;
  double hi = std::pow(hmode_range_max(field.mode), field.exponent);
  if (variant == BaselineVariant::hist1) {
    const auto [mn, mx] = std::minmax_element(field.values.begin(), field.values.end());
    lo = *mn;
    hi = *mx;
  }
  const double span = hi - lo;
  std::array<std::size_t, kBaselineBins> counts{};
  for (double h : field.values) {
    std::size_t bin = 0;
    if (span > 0.0) {
      const double x = (h - lo) / span * static_cast<double>(kBaselineBins);
      bin = static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(kBaselineBins - 1)));
    }
    ++counts[bin];
  }
  for (std::size_t b = 0; b < kBaselineBins; ++b)
    hist.bins[b] = static_cast<double>(counts[b]) / static_cast<double>(field.values.size());
  return hist;
}

namespace {

std::string format_row(std::span<const double> row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) line += ' ';
    line += fmt::format("{:.15f}", row[i]);
  }
  line += '\n';
  return line;
}

std::vector<double> parse_row(std::istream& in, std::size_t expected, std::size_t row) {
  std::string line;
  while (std::getline(in, line) && line.find_first_not_of(" \t\r") == std::string::npos) {
  }
  if (!in && line.empty()) throw ParseError(fmt::format("descriptor: missing row {}", row));
  std::istringstream ls(line);
  std::vector<double> values;
  double x;
  while (ls >> x) {
    if (!(x >= 0.0)) throw ParseError(fmt::format("descriptor: negative entry in row {}", row));
    values.push_back(x);
  }
  if (values.size() != expected)
    throw ParseError(
        fmt::format("descriptor: row {} has {} values, expected {}", row, values.size(), expected));
  return values;
}

}  // namespace

void write_descriptor(std::ostream& out, const Descriptor& d) {
  const auto& p = d.params;
  std::string buf = fmt::format("edgelbp {} {} {} {} {} {}\n", p.samples, p.rings, p.r_max,
                                to_string(p.h_mode), p.exponent, d.admissible_count);
  for (std::size_t r = 0; r < d.matrix.rows(); ++r) buf += format_row(d.matrix.row(r));
  out << buf;
}

Descriptor read_descriptor(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("descriptor: empty file");
  std::istringstream hs(header);
  std::string tag, mode;
  Descriptor d;
  if (!(hs >> tag) || tag != "edgelbp") throw ParseError("descriptor: not an edgelbp file");
  if (!(hs >> d.params.samples >> d.params.rings >> d.params.r_max >> mode >> d.params.exponent >>
        d.admissible_count))
    throw ParseError("descriptor: malformed header");
  try {
    d.params.h_mode = parse_hmode(mode);
    d.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("descriptor: {}", e.what()));
  }
  const auto rows = static_cast<std::size_t>(d.params.rings);
  const auto cols = static_cast<std::size_t>(d.params.samples) + 1;
  d.matrix = HistogramMatrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto values = parse_row(in, cols, r);
    std::copy(values.begin(), values.end(), d.matrix.row(r).begin());
  }
  return d;
}

void write_baseline(std::ostream& out, const BaselineHistogram& h) {
  std::string buf = fmt::format("{} {} {} {}\n", h.normalized_range() ? "hist1" : "hist2",
                                kBaselineBins, to_string(h.h_mode), h.exponent);
  buf += format_row(h.bins);
  out << buf;
}

BaselineHistogram read_baseline(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("baseline: empty file");
  std::istringstream hs(header);
  std::string tag, mode;
  std::size_t bins = 0;
  BaselineHistogram h;
  if (!(hs >> tag >> bins >> mode >> h.exponent)) throw ParseError("baseline: malformed header");
  if (tag == "hist1") {
    h.variant = BaselineVariant::hist1;
  } else if (tag == "hist2") {
    h.variant = BaselineVariant::hist2;
  } else {
    throw ParseError(fmt::format("baseline: unknown kind '{}'", tag));
  }
  if (bins != kBaselineBins) throw ParseError("baseline: unsupported bin count");
  try {
    h.h_mode = parse_hmode(mode);
  } catch (const std::invalid_argument& e) {
    throw ParseError(fmt::format("baseline: {}", e.what()));
  }
  const auto values = parse_row(in, kBaselineBins, 0);
  std::copy(values.begin(), values.end(), h.bins.begin());
  return h;
}

void save_descriptor(const std::filesystem::path& path, const Descriptor& d) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  write_descriptor(out, d);
}

Descriptor load_descriptor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read_descriptor(in);
}

}  // namespace edgelbp
