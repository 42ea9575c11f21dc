#include "edgelbp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "edgelbp/datagen.hpp"
#include "edgelbp/descriptor.hpp"
#include "edgelbp/errors.hpp"
#include "edgelbp/evaluation.hpp"
#include "edgelbp/mesh_io.hpp"
#include "edgelbp/similarity.hpp"

namespace edgelbp::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  EdgeLbpParams params;
  std::string h = "lab";
  std::string metric = "bha";
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t seed = 1;
  std::size_t e_cutoff = kDefaultECutoff;

  std::vector<std::string> inputs;
  std::string manifest;
  std::string out;
  std::string kind = "edgelbp";
  std::string matrix;
  std::size_t resolution = 10000;
  long long vertex = -1;
  std::string start_field;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  f << text;
  if (!f) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

// Missing files are I/O failures, not malformed meshes.
SurfaceMesh load_existing_mesh(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return load_mesh(path);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const MeshError*>(&e)) return kParseError;
  if (dynamic_cast<const IncompatibleError*>(&e)) return kIncompatible;
  if (dynamic_cast<const NoAdmissibleVertices*>(&e)) return kNoAdmissible;
  return kFailure;
}

// Mesh paths from the positional inputs followed by the manifest rows.
std::vector<fs::path> mesh_inputs(const RunConfig& c) {
  std::vector<fs::path> paths(c.inputs.begin(), c.inputs.end());
  if (!c.manifest.empty()) {
    const fs::path dir = fs::path(c.manifest).parent_path();
    for (const auto& e : read_manifest(c.manifest)) paths.push_back(dir / e.file);
  }
  return paths;
}

int cmd_describe(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto paths = mesh_inputs(c);
  if (paths.empty()) throw std::invalid_argument("describe: no input meshes");
  fs::create_directories(c.out);
  const bool edge_lbp = c.kind == "edgelbp";
  const BaselineVariant variant = c.kind == "hist2" ? BaselineVariant::hist2 : BaselineVariant::hist1;

  std::string log = fmt::format("kind={} P={} Nr={} Rmax={} h={} exp={}\n", c.kind, c.params.samples,
                                c.params.rings, c.params.r_max, to_string(c.params.h_mode),
                                c.params.exponent);
  int status = kOk;
  for (const auto& path : paths) {
    const std::string stem = path.stem().string();
    try {
      const SurfaceMesh mesh = load_existing_mesh(path);
      const ScalarField field = compute_scalar_field(mesh, c.params.h_mode, c.params.exponent);
      std::ostringstream text;
      if (edge_lbp) {
        const VertexCodes codes = compute_vertex_codes(mesh, field, c.params, c.threads);
        const double rate = static_cast<double>(codes.admissible_count()) /
                            static_cast<double>(mesh.vertex_count());
        log += fmt::format("{} vertices={} admissible={} rate={:.6f}", path.filename().string(),
                           mesh.vertex_count(), codes.admissible_count(), rate);
        for (const auto& [s, n] : codes.status_counts())
          if (s != RingStatus::admissible) log += fmt::format(" [{}]={}", to_string(s), n);
        log += '\n';
        write_descriptor(text, descriptor_from_codes(codes, c.params));
      } else {
        log += fmt::format("{} vertices={}\n", path.filename().string(), mesh.vertex_count());
        write_baseline(text, baseline_histogram(field, variant));
      }
      write_text(fs::path(c.out) / (stem + (edge_lbp ? ".desc" : ".hist")), text.str());
    } catch (const std::exception& e) {
      log += fmt::format("{} FAILED: {}\n", path.filename().string(), e.what());
      err << fmt::format("{}: {}\n", path.string(), e.what());
      if (status == kOk) status = exit_code_for(e);
    }
  }
  write_text(fs::path(c.out) / "describe_log.txt", log);
  out << fmt::format("described {} mesh(es) into {}\n", paths.size(), c.out);
  return status;
}

int cmd_distmat(const RunConfig& c, std::ostream& out) {
  std::vector<Signature> items;
  for (const auto& in : c.inputs) items.push_back(load_signature(in));
  const auto m = distance_matrix(items, parse_metric(c.metric), c.threads);
  const fs::path target(c.out);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  save_distance_matrix(target, m);
  out << fmt::format("{}x{} {} matrix written to {}\n", m.size(), m.size(), to_string(m.metric), c.out);
  return kOk;
}

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  auto matrix = load_distance_matrix(c.matrix);
  std::map<std::string, std::string> class_of;
  for (const auto& e : read_manifest(c.manifest)) class_of[fs::path(e.file).stem().string()] = e.pattern_class;
  std::vector<std::string> names;
  for (const auto& label : matrix.labels) {
    auto it = class_of.find(label);
    if (it == class_of.end())
      throw std::runtime_error(fmt::format("label '{}' is not in manifest '{}'", label, c.manifest));
    names.push_back(it->second);
  }
  const auto data = LabeledDataset::from_names(std::move(matrix), names);
  const auto report = evaluate(data, c.e_cutoff);
  write_report(c.out, report, data);
  out << fmt::format("NN={:.3f} FT={:.3f} ST={:.3f} e={:.3f} mAP={:.3f} nDCG={:.3f}\n", report.nn,
                     report.ft, report.st, report.e_measure, report.map, report.ndcg);
  if (report.e_cutoff < c.e_cutoff)
    out << fmt::format("e-measure cutoff clamped from {} to {}\n", c.e_cutoff, report.e_cutoff);
  return kOk;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const auto entries = build_cpp_like_dataset(default_shapes(c.resolution), default_patterns(), c.out, c.seed);
  out << fmt::format("{} models written to {} (suggested --Rmax {})\n", entries.size(), c.out,
                     kDefaultDatasetRMax);
  return kOk;
}

int cmd_inspect(const RunConfig& c, std::ostream& out) {
  if (c.inputs.size() != 1) throw std::invalid_argument("inspect takes exactly one mesh");
  const SurfaceMesh mesh = load_existing_mesh(c.inputs[0]);
  if (c.vertex < 0 || static_cast<std::size_t>(c.vertex) >= mesh.vertex_count())
    throw std::invalid_argument(fmt::format("vertex {} out of range (mesh has {} vertices)", c.vertex,
                                            mesh.vertex_count()));
  const auto v = static_cast<Index>(c.vertex);
  const ScalarField field = compute_scalar_field(mesh, c.params.h_mode, c.params.exponent);
  const auto radii = c.params.radii();
  const auto set = extract_rings(mesh, field, v, radii, c.params.samples, true);
  const Vec3& center = mesh.position(v);

  std::string text = fmt::format("vertex {} h={:.9f}\n", v, field[v]);
  if (!set.admissible()) {
    text += fmt::format("not admissible: {} (ring {}, R={:.9f})\n", to_string(set.status),
                        set.failed_ring + 1, radii[set.failed_ring]);
  } else {
    for (std::size_t k = 0; k < set.rings.size(); ++k) {
      const auto& curve = set.curves[k];
      const auto& ring = set.rings[k];
      text += fmt::format("ring {} R={:.9f} points={} lbp={}\n", k + 1, radii[k], curve.size(),
                          edge_lbp_value(field[v], ring.h_samples));
      for (std::size_t i = 0; i < curve.size(); ++i) {
        const auto& p = curve.points[i];
        text += fmt::format("  point {:.9f} {:.9f} {:.9f} dist={:.9f} h={:.9f}\n", p.x(), p.y(), p.z(),
                            (p - center).norm(), curve.h_values[i]);
      }
      for (std::size_t i = 0; i < ring.samples.size(); ++i) {
        const auto& p = ring.samples[i];
        text += fmt::format("  sample {:.9f} {:.9f} {:.9f} h={:.9f}\n", p.x(), p.y(), p.z(),
                            ring.h_samples[i]);
      }
    }
  }
  out << text;
  if (!c.start_field.empty()) start_field_export(mesh, field, c.params.r_max, c.start_field);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"edgeLBP texture descriptors for colored meshes"};
  app.set_help_flag("--help", "print help and exit");  // -h would clash with --h
  app.set_config("--config", "", "key=value file; flags given on the command line win");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--P", c.params.samples, "samples per ring")->capture_default_str();
  app.add_option("--Nr", c.params.rings, "number of rings")->capture_default_str();
  app.add_option("--Rmax", c.params.r_max, "outer ring radius")->capture_default_str();
  app.add_option("--h", c.h, "scalar field")->check(CLI::IsMember({"lab", "gray", "cielab_l", "grayscale"}))
      ->capture_default_str();
  app.add_option("--exp", c.params.exponent, "exponent applied to the scalar field")->capture_default_str();
  app.add_option("--metric", c.metric, "distance")
      ->check(CLI::IsMember({"bha", "euc", "emd", "bhattacharyya", "euclidean"}))
      ->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", c.seed, "dataset seed")->capture_default_str();
  app.add_option("--ecut", c.e_cutoff, "e-measure cutoff")->check(CLI::PositiveNumber)->capture_default_str();

  auto* describe = app.add_subcommand("describe", "compute one descriptor per mesh");
  describe->add_option("meshes", c.inputs, "mesh files (.ply, .obj)");
  describe->add_option("--manifest", c.manifest, "also describe every file of a dataset manifest");
  describe->add_option("-o,--out", c.out, "output directory")->required();
  describe->add_option("--kind", c.kind, "descriptor kind")
      ->check(CLI::IsMember({"edgelbp", "hist1", "hist2"}))
      ->capture_default_str();

  auto* distmat = app.add_subcommand("distmat", "pairwise distances between descriptor files");
  distmat->add_option("descriptors", c.inputs, "descriptor or histogram files")->required();
  distmat->add_option("-o,--out", c.out, "output CSV")->required();

  auto* eval = app.add_subcommand("evaluate", "retrieval scores for a distance matrix");
  eval->add_option("--matrix", c.matrix, "distance matrix CSV")->required();
  eval->add_option("--manifest", c.manifest, "dataset manifest giving the classes")->required();
  eval->add_option("-o,--out", c.out, "report directory")->required();

  auto* generate = app.add_subcommand("generate", "write the synthetic textured dataset");
  generate->add_option("-o,--out", c.out, "dataset directory")->required();
  generate->add_option("--resolution", c.resolution, "target vertices per model")
      ->check(CLI::Range(std::size_t{100}, std::size_t{10000000}))
      ->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "dump the rings around one vertex");
  inspect->add_option("mesh", c.inputs, "mesh file")->required();
  inspect->add_option("--vertex", c.vertex, "vertex id")->required();
  inspect->add_option("--start-field", c.start_field, "also export start vectors at Rmax to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  try {
    c.params.h_mode = parse_hmode(c.h);
    c.params.validate();
    if (*describe) return cmd_describe(c, out, err);
    if (*distmat) return cmd_distmat(c, out);
    if (*eval) return cmd_evaluate(c, out);
    if (*generate) return cmd_generate(c, out);
    return cmd_inspect(c, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace edgelbp::cli
