#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "edgelbp/similarity.hpp"

namespace edgelbp {

/// Distance matrix plus a class id per model.
struct LabeledDataset {
  DistanceMatrix matrix;
  std::vector<int> classes;
  std::vector<std::string> class_names;  ///< class id -> name

  /// Builds from per-model class names (ids assigned in order of first appearance).
  static LabeledDataset from_names(DistanceMatrix matrix, const std::vector<std::string>& names);

  std::size_t size() const { return classes.size(); }
  std::size_t class_count() const { return class_names.size(); }
  /// Number of models sharing the class of model i (including i).
  std::size_t class_size(std::size_t i) const;
};

enum class Tier : std::uint8_t { none, nn, ft, st };

struct TierScores {
  double nn = 0.0;
  double ft = 0.0;
  double st = 0.0;
};

struct PrecisionRecall {
  std::vector<std::pair<double, double>> curve;  ///< (recall, precision)
  double map = 0.0;
};

struct EvalReport {
  double nn = 0.0, ft = 0.0, st = 0.0;
  double e_measure = 0.0;
  double map = 0.0;
  double ndcg = 0.0;
  std::size_t e_cutoff = 0;
  std::vector<std::pair<double, double>> pr_curve;
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::vector<Tier>> tier_image;
};

/// Per query: the other models by ascending distance, ties by ascending index.
std::vector<std::vector<std::size_t>> rank_all(const LabeledDataset& data);

/// Throws std::invalid_argument if some class has a single member.
TierScores tier_scores(const LabeledDataset& data);
PrecisionRecall precision_recall(const LabeledDataset& data);
/// Mean harmonic mean of precision and recall over the first k results. A cutoff beyond
/// the number of other models is clamped; `clamped` reports it.
double e_measure(const LabeledDataset& data, std::size_t k, bool* clamped = nullptr);
double ndcg(const LabeledDataset& data);

struct ConfusionAndTier {
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<std::vector<Tier>> tier_image;
};
ConfusionAndTier confusion_and_tier(const LabeledDataset& data);

inline constexpr std::size_t kDefaultECutoff = 32;

EvalReport evaluate(const LabeledDataset& data, std::size_t e_cutoff = kDefaultECutoff);

/// Writes report.txt (key=value), pr_curve.csv, confusion.csv and tier.ppm into `dir`.
void write_report(const std::filesystem::path& dir, const EvalReport& report,
                  const LabeledDataset& data);

}  // namespace edgelbp
