// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>
#include <fmt/format.h>

#include "edgelbp/cli.hpp"
#include "edgelbp/datagen.hpp"
#include "edgelbp/descriptor.hpp"
#include "edgelbp/evaluation.hpp"
#include "edgelbp/rings.hpp"
#include "edgelbp/similarity.hpp"
#include "oracles.hpp"

using namespace edgelbp;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  fmt::print("criterion {:2}: {} {}\n", id, pass ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
  if (!pass) ++failures;
}

// ---------------------------------------------------------------------------------------
// Flat-grid fixtures.

constexpr int kGridSide = 200;
constexpr double kGridSpacing = 0.01;

// Smooth-edged binary pattern with features from a few to tens of cells.
bool grid_pattern(double x, double y) {
  return std::sin(9.0 * x + 2.0 * y) + std::sin(4.0 * y - 3.0 * x + 1.0) + 0.6 * std::sin(23.0 * x * y) > 0.3;
}

SurfaceMesh pattern_grid() {
  const double size = kGridSpacing * (kGridSide - 1);
  const SurfaceMesh base =
      generate_base_mesh({ShapeKind::plane_grid, static_cast<std::size_t>(kGridSide * kGridSide), size}, 0);
  std::vector<Rgb> colors;
  for (const auto& p : base.vertices())
    colors.push_back(grid_pattern(p.x(), p.y()) ? Rgb{30, 60, 170} : Rgb{240, 220, 90});
  return SurfaceMesh::build(base.vertices(), colors, base.faces());
}

// Image-domain multi-ring LBP on the binary pattern image: bilinear interpolation at P
// points on each circle, counting samples brighter than the center pixel.
std::vector<std::vector<double>> image_lbp_histograms(const std::vector<double>& image, int side, int samples,
                                                      const std::vector<int>& radii_cells, int margin) {
  const auto pixel = [&](int i, int j) { return image[static_cast<std::size_t>(j * side + i)]; };
  const auto bilinear = [&](double x, double y) {
    const int i = static_cast<int>(std::floor(x)), j = static_cast<int>(std::floor(y));
    const double fx = x - i, fy = y - j;
    return (1 - fx) * (1 - fy) * pixel(i, j) + fx * (1 - fy) * pixel(i + 1, j) + (1 - fx) * fy * pixel(i, j + 1) +
           fx * fy * pixel(i + 1, j + 1);
  };
  std::vector<std::vector<double>> hist(radii_cells.size(), std::vector<double>(samples + 1, 0.0));
  double count = 0.0;
  for (int j = margin; j < side - margin; ++j) {
    for (int i = margin; i < side - margin; ++i) {
      const double center = pixel(i, j);
      for (std::size_t k = 0; k < radii_cells.size(); ++k) {
        int code = 0;
        for (int s = 0; s < samples; ++s) {
          const double a = 2.0 * kPi * s / samples;
          if (bilinear(i + radii_cells[k] * std::cos(a), j + radii_cells[k] * std::sin(a)) > center) ++code;
        }
        hist[k][static_cast<std::size_t>(code)] += 1.0;
      }
      count += 1.0;
    }
  }
  for (auto& row : hist)
    for (auto& x : row) x /= count;
  return hist;
}

void criterion_1() {
  const auto t0 = Clock::now();
  const SurfaceMesh mesh = pattern_grid();
  EdgeLbpParams params;
  params.samples = 15;
  params.rings = 5;
  params.r_max = 5 * kGridSpacing;
  const auto codes = compute_vertex_codes(mesh, compute_scalar_field(mesh, params.h_mode), params);
  const Descriptor d = descriptor_from_codes(codes, params);

  std::vector<double> image;
  for (const auto& p : mesh.vertices()) image.push_back(grid_pattern(p.x(), p.y()) ? 0.0 : 1.0);
  // Ring radii are 1..5 cells; a vertex is admissible when its outer ring stays off the border.
  const int margin = 6;
  const auto oracle = image_lbp_histograms(image, kGridSide, params.samples, {1, 2, 3, 4, 5}, margin);
  const auto expected_admissible = static_cast<std::size_t>((kGridSide - 2 * margin) * (kGridSide - 2 * margin));

  double worst = 0.0;
  std::string per_ring;
  for (std::size_t k = 0; k < oracle.size(); ++k) {
    double l1 = 0.0;
    for (std::size_t m = 0; m < oracle[k].size(); ++m) l1 += std::abs(oracle[k][m] - d.matrix(k, m));
    worst = std::max(worst, l1);
    per_ring += fmt::format("{}{:.4f}", k ? "," : "", l1);
  }
  const double elapsed = seconds_since(t0);
  report(1, worst <= 0.05 && elapsed < 60.0 && d.admissible_count == expected_admissible,
         fmt::format("per-ring L1 [{}] (<= 0.05), admissible {} of expected {}, {:.1f}s (< 60s)", per_ring,
                     d.admissible_count, expected_admissible, elapsed));
}

void criterion_2() {
  const SurfaceMesh mesh = pattern_grid();
  const ScalarField field = compute_scalar_field(mesh, HMode::cielab_l);
  const double radius = 10 * kGridSpacing;  // spacing = R/10
  const std::vector<double> radii{0.5 * radius, radius};
  RingExtractor extractor(mesh, field);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> cell(12, kGridSide - 13);
  double worst_point = 0.0, worst_length = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto v = static_cast<Index>(cell(rng) * kGridSide + cell(rng));
    const auto set = extractor.extract(v, radii, 15, true);
    if (!set.admissible()) {
      report(2, false, fmt::format("vertex {} not admissible: {}", v, to_string(set.status)));
      return;
    }
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const auto& pts = set.curves[k].points;
      for (const auto& p : pts)
        worst_point = std::max(worst_point, std::abs((p - mesh.position(v)).norm() - radii[k]) / radii[k]);
      if (radii[k] >= 10 * kGridSpacing - 1e-15) {
        double length = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) length += (pts[(i + 1) % pts.size()] - pts[i]).norm();
        worst_length = std::max(worst_length, std::abs(length / (2 * kPi * radii[k]) - 1.0));
      }
    }
    ++checked;
  }
  report(2, worst_point <= 1e-6 && worst_length <= 0.01,
         fmt::format("{} vertices: max relative point error {:.2e} (<= 1e-6), max length error {:.4f}% (<= 1%)",
                     checked, worst_point, 100 * worst_length));
}

// ---------------------------------------------------------------------------------------
// Dataset criteria.

struct DatasetRun {
  std::vector<DatasetModel> models;
  EdgeLbpParams params;
  std::vector<Descriptor> descriptors;
  std::vector<Signature> edge_lbp, hist1, hist2;
  std::vector<std::string> classes;
  double describe_seconds = 0.0;
};

DatasetRun build_dataset_run() {
  DatasetRun run;
  run.models = build_cpp_like_models(default_shapes(10000), default_patterns(), 1);
  run.params.r_max = kDefaultDatasetRMax;
  const auto t0 = Clock::now();
  for (const auto& m : run.models) {
    const ScalarField field = compute_scalar_field(m.mesh, run.params.h_mode, run.params.exponent);
    run.descriptors.push_back(compute_descriptor(m.mesh, field, run.params, 1));
    run.edge_lbp.push_back(make_signature(m.entry.file, run.descriptors.back()));
    run.hist1.push_back(make_signature(m.entry.file, baseline_histogram(field, BaselineVariant::hist1)));
    run.hist2.push_back(make_signature(m.entry.file, baseline_histogram(field, BaselineVariant::hist2)));
    run.classes.push_back(m.entry.pattern_class);
  }
  run.describe_seconds = seconds_since(t0);
  return run;
}

LabeledDataset labeled(const DatasetRun& run, const std::vector<Signature>& items) {
  return LabeledDataset::from_names(distance_matrix(items, Metric::bhattacharyya, 1), run.classes);
}

void criterion_3(const DatasetRun& run) {
  const Eigen::Matrix3d rotation =
      Eigen::AngleAxisd(0.83, Eigen::Vector3d(0.3, -0.5, 0.8).normalized()).toRotationMatrix();
  const Vec3 translation(3.5, -1.25, 7.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < run.models.size(); ++i) {
    const auto moved = compute_descriptor(transformed(run.models[i].mesh, rotation, translation), run.params);
    for (std::size_t k = 0; k < moved.matrix.rows(); ++k)
      for (std::size_t m = 0; m < moved.matrix.cols(); ++m)
        worst = std::max(worst, std::abs(moved.matrix(k, m) - run.descriptors[i].matrix(k, m)));
  }
  report(3, worst <= 1e-9,
         fmt::format("{} models rotated and translated: max entry difference {:.2e} (<= 1e-9)", run.models.size(),
                     worst));
}

void criterion_4(const DatasetRun& run) {
  double worst = 0.0;
  for (const auto& d : run.descriptors)
    for (std::size_t k = 0; k < d.matrix.rows(); ++k) {
      double sum = 0.0;
      for (double x : d.matrix.row(k)) sum += x;
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  report(4, worst <= 1e-9, fmt::format("{} models: max |row sum - 1| {:.2e} (<= 1e-9)", run.descriptors.size(), worst));
}

void criteria_5_and_6(const DatasetRun& run) {
  const auto ours = evaluate(labeled(run, run.edge_lbp));
  const auto h1 = evaluate(labeled(run, run.hist1));
  const auto h2 = evaluate(labeled(run, run.hist2));
  report(5, ours.nn >= 0.9 && ours.ft >= 0.7 && run.describe_seconds < 600.0,
         fmt::format("NN {:.3f} (>= 0.9), FT {:.3f} (>= 0.7), ST {:.3f}, e {:.3f}, mAP {:.3f}, nDCG {:.3f}; "
                     "20 models described single-threaded in {:.1f}s (< 600s)",
                     ours.nn, ours.ft, ours.st, ours.e_measure, ours.map, ours.ndcg, run.describe_seconds));
  report(6, ours.map > h1.map && ours.map > h2.map,
         fmt::format("mAP edgeLBP {:.3f} vs Hist1 {:.3f} and Hist2 {:.3f}", ours.map, h1.map, h2.map));
}

void criterion_7(const DatasetRun& run) {
  const auto matrix = distance_matrix(run.edge_lbp, Metric::bhattacharyya, 1);
  int bad = 0;
  double tightest = std::numeric_limits<double>::infinity();
  std::string worst_model;
  for (std::size_t i = 0; i < run.models.size(); ++i) {
    const auto sub = compute_descriptor(subdivide_with_color(run.models[i].mesh), run.params);
    const double self = bhattacharyya_distance(run.descriptors[i], sub);
    double other = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < run.models.size(); ++j)
      if (run.classes[j] != run.classes[i]) other = std::min(other, matrix(i, j));
    if (self >= other) ++bad;
    if (other / self < tightest) {
      tightest = other / self;
      worst_model = run.models[i].entry.file;
    }
  }
  report(7, bad == 0,
         fmt::format("{} of {} models closer to another class than to their subdivision; tightest margin "
                     "{:.2f}x ({})",
                     bad, run.models.size(), tightest, worst_model));
}

// ---------------------------------------------------------------------------------------

void criterion_8() {
  std::mt19937_64 rng(8);
  double worst_self = 0.0, worst_sym = 0.0, worst_emd = 0.0;
  bool in_range = true;
  for (int i = 0; i < 1000; ++i) {
    const auto a = oracle::random_stochastic(rng, 5, 16);
    const auto b = oracle::random_stochastic(rng, 5, 16);
    for (Metric m : {Metric::bhattacharyya, Metric::euclidean, Metric::emd}) {
      worst_self = std::max(worst_self, std::abs(distance(a, a, m)));
      worst_sym = std::max(worst_sym, std::abs(distance(a, b, m) - distance(b, a, m)));
    }
    const double bha = bhattacharyya_distance(a, b);
    in_range = in_range && bha >= 0.0 && bha <= 1.0;

    const int bins = 2 + static_cast<int>(rng() % 5);
    std::vector<std::int64_t> ma(static_cast<std::size_t>(bins), 0), mb = ma;
    for (int k = 0; k < 60; ++k) {
      ++ma[rng() % bins];
      ++mb[rng() % bins];
    }
    HistogramMatrix ha(1, static_cast<std::size_t>(bins)), hb(1, static_cast<std::size_t>(bins));
    for (int k = 0; k < bins; ++k) {
      ha(0, k) = ma[k] / 60.0;
      hb(0, k) = mb[k] / 60.0;
    }
    const double expected = static_cast<double>(oracle::transport_cost(ma, mb)) / 60.0;
    worst_emd = std::max(worst_emd, std::abs(emd_distance(ha, hb) - expected));
  }
  report(8, worst_self == 0.0 && worst_sym <= 1e-12 && in_range && worst_emd <= 1e-12,
         fmt::format("1000 pairs: max d(A,A) {:.1e}, max asymmetry {:.1e}, Bhattacharyya in [0,1]: {}, "
                     "max EMD vs transport oracle {:.1e}",
                     worst_self, worst_sym, in_range ? "yes" : "no", worst_emd));
}

LabeledDataset dataset_from(std::size_t n, std::vector<double> values, const std::vector<std::string>& classes) {
  DistanceMatrix m;
  for (std::size_t i = 0; i < n; ++i) m.labels.push_back(std::to_string(i));
  m.values = std::move(values);
  return LabeledDataset::from_names(std::move(m), classes);
}

void criterion_9() {
  bool ok = true;
  std::string detail;

  // Ideal block-diagonal matrix: 4 classes of 5.
  const std::size_t per = 5, n = 20;
  std::vector<double> v(n * n, 0.0);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("c" + std::to_string(i / per));
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) v[i * n + j] = (i / per == j / per) ? 0.25 : 0.75;
  }
  const auto ideal = dataset_from(n, v, names);
  const auto r = evaluate(ideal, per - 1);
  const bool ideal_ok = r.nn == 1.0 && r.ft == 1.0 && r.st == 1.0 && r.map == 1.0 &&
                        std::abs(r.ndcg - 1.0) <= 1e-15 && std::abs(r.e_measure - 1.0) <= 1e-15;
  ok = ok && ideal_ok;
  detail += fmt::format("ideal: NN {} FT {} ST {} mAP {} nDCG {} e@{} {}", r.nn, r.ft, r.st, r.map, r.ndcg,
                        r.e_cutoff, r.e_measure);

  // Hand-built 4-model cases against position enumeration.
  const std::vector<std::vector<double>> cases = {
      {0, .3, .1, .5, .3, 0, .4, .2, .1, .4, 0, .6, .5, .2, .6, 0},
      {0, .2, .2, .2, .2, 0, .2, .2, .2, .2, 0, .2, .2, .2, .2, 0},
      {0, .1, .9, .8, .1, 0, .7, .6, .9, .7, 0, .2, .8, .6, .2, 0},
      {0, .5, .4, .5, .5, 0, .5, .1, .4, .5, 0, .5, .5, .1, .5, 0},
  };
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto d = dataset_from(4, c, {"A", "A", "B", "B"});
    const auto got = evaluate(d);
    const auto want = oracle::direct_scores(d);
    for (auto [x, y] : {std::pair{got.nn, want.nn}, {got.ft, want.ft}, {got.st, want.st}, {got.map, want.map},
                        {got.ndcg, want.ndcg}})
      worst = std::max(worst, std::abs(x - y));
  }
  const auto first = evaluate(dataset_from(4, cases[0], {"A", "A", "B", "B"}));
  const bool hand_ok = first.nn == 0.0 && first.ft == 0.0 && first.st == 0.5 &&
                       std::abs(first.map - 5.0 / 12.0) <= 1e-15 && std::abs(first.e_measure - 0.5) <= 1e-15;
  ok = ok && hand_ok && worst <= 1e-15;
  detail += fmt::format("; {} 4-model cases, max deviation from enumeration {:.1e}", cases.size(), worst);
  report(9, ok, detail);
}

// ---------------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// generate -> describe -> distmat -> evaluate through the command line front end.
std::vector<std::pair<std::string, std::string>> run_pipeline(const fs::path& root, const std::string& threads) {
  fs::remove_all(root);
  std::ostringstream out, err;
  const auto call = [&](std::vector<std::string> args) {
    args.insert(args.end(), {"--threads", threads, "--seed", "11", "--Rmax", "0.2"});
    if (cli::run(args, out, err) != cli::kOk) throw std::runtime_error("pipeline step failed: " + err.str());
  };
  call({"generate", "-o", (root / "data").string(), "--resolution", "2500"});
  call({"describe", "--manifest", (root / "data" / "manifest.csv").string(), "-o", (root / "desc").string()});
  std::vector<std::string> distmat{"distmat", "-o", (root / "matrix.csv").string()};
  for (const auto& e : read_manifest(root / "data" / "manifest.csv"))
    distmat.push_back((root / "desc" / (fs::path(e.file).stem().string() + ".desc")).string());
  call(distmat);
  call({"evaluate", "--matrix", (root / "matrix.csv").string(), "--manifest",
        (root / "data" / "manifest.csv").string(), "-o", (root / "report").string()});

  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& sub : {"desc", "report"})
    for (const auto& entry : fs::directory_iterator(root / sub))
      files.emplace_back(fs::relative(entry.path(), root).string(), slurp(entry.path()));
  files.emplace_back("matrix.csv", slurp(root / "matrix.csv"));
  std::sort(files.begin(), files.end());
  return files;
}

void criterion_10() {
  const fs::path root = fs::temp_directory_path() / "edgelbp_acceptance_determinism";
  try {
    const auto a1 = run_pipeline(root / "a", "1");
    const auto b1 = run_pipeline(root / "b", "1");
    const auto a8 = run_pipeline(root / "c", "8");
    const auto b8 = run_pipeline(root / "d", "8");
    std::size_t differing = 0;
    bool same_sets = a1.size() == b1.size() && a1.size() == a8.size() && a1.size() == b8.size();
    for (std::size_t i = 0; same_sets && i < a1.size(); ++i) {
      same_sets = a1[i].first == b1[i].first && a1[i].first == a8[i].first && a1[i].first == b8[i].first;
      if (a1[i].second != b1[i].second || a1[i].second != a8[i].second || a1[i].second != b8[i].second) ++differing;
    }
    report(10, same_sets && differing == 0,
           fmt::format("{} artifacts per run, 4 runs (2 at 1 thread, 2 at 8 threads), {} differ", a1.size(),
                       differing));
  } catch (const std::exception& e) {
    report(10, false, e.what());
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_1();
  criterion_2();
  const DatasetRun run = build_dataset_run();
  criterion_3(run);
  criterion_4(run);
  criteria_5_and_6(run);
  criterion_7(run);
  criterion_8();
  criterion_9();
  criterion_10();
  fmt::print("{} of 10 criteria failed ({:.0f}s)\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
