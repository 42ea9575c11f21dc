#include "edgelbp/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace edgelbp {

LabeledDataset LabeledDataset::from_names(DistanceMatrix matrix,
                                          const std::vector<std::string>& names) {
  if (names.size() != matrix.size())
    throw std::invalid_argument(fmt::format("{} class labels for a {}x{} distance matrix",
                                            names.size(), matrix.size(), matrix.size()));
  LabeledDataset data;
  data.matrix = std::move(matrix);
  for (const auto& name : names) {
    auto it = std::find(data.class_names.begin(), data.class_names.end(), name);
    if (it == data.class_names.end()) {
      data.classes.push_back(static_cast<int>(data.class_names.size()));
      data.class_names.push_back(name);
    } else {
      data.classes.push_back(static_cast<int>(it - data.class_names.begin()));
    }
  }
  return data;
}

std::size_t LabeledDataset::class_size(std::size_t i) const {
  return static_cast<std::size_t>(std::count(classes.begin(), classes.end(), classes[i]));
}

namespace {

void require_tiers(const LabeledDataset& data) {
  if (data.size() < 2) throw std::invalid_argument("evaluation needs at least 2 models");
  if (data.matrix.size() != data.size())
    throw std::invalid_argument("class list does not match the distance matrix");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.class_size(i) < 2)
      throw std::invalid_argument(
          fmt::format("class '{}' has a single member", data.class_names[data.classes[i]]));
  }
}

std::size_t relevant_in_top(const LabeledDataset& data, std::size_t query,
                            const std::vector<std::size_t>& ranking, std::size_t k) {
  k = std::min(k, ranking.size());
  return static_cast<std::size_t>(
      std::count_if(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k),
                    [&](std::size_t j) { return data.classes[j] == data.classes[query]; }));
}

}  // namespace

std::vector<std::vector<std::size_t>> rank_all(const LabeledDataset& data) {
  const std::size_t n = data.matrix.size();
  std::vector<std::vector<std::size_t>> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = ranks[i];
    r.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r.push_back(j);
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) {
      return data.matrix(i, a) < data.matrix(i, b);
    });
  }
  return ranks;
}

TierScores tier_scores(const LabeledDataset& data) {
  require_tiers(data);
  const auto ranks = rank_all(data);
  TierScores s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t relevant = data.class_size(i) - 1;
    s.nn += static_cast<double>(relevant_in_top(data, i, ranks[i], 1));
    s.ft += static_cast<double>(relevant_in_top(data, i, ranks[i], relevant)) / relevant;
    s.st += static_cast<double>(relevant_in_top(data, i, ranks[i], 2 * relevant)) / relevant;
  }
  const auto n = static_cast<double>(data.size());
  s.nn /= n;
  s.ft /= n;
  s.st /= n;
  return s;
}

PrecisionRecall precision_recall(const LabeledDataset& data) {
  require_tiers(data);
  const auto ranks = rank_all(data);
  const std::size_t n = data.size();

  // Precision at the j-th relevant hit, per query.
  std::vector<std::vector<double>> hits(n);
  PrecisionRecall pr;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t found = 0;
    for (std::size_t pos = 0; pos < ranks[i].size(); ++pos) {
      if (data.classes[ranks[i][pos]] != data.classes[i]) continue;
      ++found;
      hits[i].push_back(static_cast<double>(found) / static_cast<double>(pos + 1));
    }
    pr.map += std::accumulate(hits[i].begin(), hits[i].end(), 0.0) /
              static_cast<double>(hits[i].size());
  }
  pr.map /= static_cast<double>(n);

  std::vector<double> levels;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = hits[i].size();
    for (std::size_t j = 1; j <= c; ++j) levels.push_back(static_cast<double>(j) / c);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               levels.end());
  for (double level : levels) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<double>(hits[i].size());
      // First hit whose recall reaches the level.
      auto j = static_cast<std::size_t>(std::ceil(level * c - 1e-9));
      j = std::clamp<std::size_t>(j, 1, hits[i].size());
      sum += hits[i][j - 1];
    }
    pr.curve.emplace_back(level, sum / static_cast<double>(n));
  }
  return pr;
}

double e_measure(const LabeledDataset& data, std::size_t k, bool* clamped) {
  require_tiers(data);
  if (k < 1) throw std::invalid_argument("e-measure cutoff must be at least 1");
  const std::size_t limit = data.size() - 1;
  if (clamped) *clamped = k > limit;
  k = std::min(k, limit);
  const auto ranks = rank_all(data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rel = static_cast<double>(relevant_in_top(data, i, ranks[i], k));
    if (rel == 0.0) continue;
    const double precision = rel / static_cast<double>(k);
    const double recall = rel / static_cast<double>(data.class_size(i) - 1);
    total += 2.0 / (1.0 / precision + 1.0 / recall);
  }
  return total / static_cast<double>(data.size());
}

double ndcg(const LabeledDataset& data) {
  require_tiers(data);
  const auto ranks = rank_all(data);
  const auto discount = [](std::size_t pos) {  // 1-based position
    return pos == 1 ? 1.0 : 1.0 / std::log2(static_cast<double>(pos));
  };
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    double dcg = 0.0, ideal = 0.0;
    for (std::size_t pos = 0; pos < ranks[i].size(); ++pos)
      if (data.classes[ranks[i][pos]] == data.classes[i]) dcg += discount(pos + 1);
    const std::size_t relevant = data.class_size(i) - 1;
    for (std::size_t pos = 1; pos <= relevant; ++pos) ideal += discount(pos);
    total += dcg / ideal;
  }
  return total / static_cast<double>(data.size());
}

ConfusionAndTier confusion_and_tier(const LabeledDataset& data) {
  require_tiers(data);
  const auto ranks = rank_all(data);
  const std::size_t n = data.size();
  ConfusionAndTier out;
  out.confusion.assign(data.class_count(), std::vector<std::size_t>(data.class_count(), 0));
  out.tier_image.assign(n, std::vector<Tier>(n, Tier::none));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t relevant = data.class_size(i) - 1;
    ++out.confusion[data.classes[i]][data.classes[ranks[i][0]]];
    for (std::size_t pos = 0; pos < ranks[i].size(); ++pos) {
      Tier t = Tier::none;
      if (pos == 0) {
        t = Tier::nn;
      } else if (pos < relevant) {
        t = Tier::ft;
      } else if (pos < 2 * relevant) {
        t = Tier::st;
      }
      out.tier_image[i][ranks[i][pos]] = t;
    }
  }
  return out;
}

EvalReport evaluate(const LabeledDataset& data, std::size_t e_cutoff) {
  EvalReport r;
  const auto tiers = tier_scores(data);
  r.nn = tiers.nn;
  r.ft = tiers.ft;
  r.st = tiers.st;
  r.e_cutoff = std::min(e_cutoff, data.size() - 1);
  r.e_measure = e_measure(data, e_cutoff);
  auto pr = precision_recall(data);
  r.map = pr.map;
  r.pr_curve = std::move(pr.curve);
  r.ndcg = ndcg(data);
  auto ct = confusion_and_tier(data);
  r.confusion = std::move(ct.confusion);
  r.tier_image = std::move(ct.tier_image);
  return r;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

void write_report(const std::filesystem::path& dir, const EvalReport& report,
                  const LabeledDataset& data) {
  std::filesystem::create_directories(dir);

  write_file(dir / "report.txt",
             fmt::format("NN={:.6f}\nFT={:.6f}\nST={:.6f}\ne={:.6f}\nmAP={:.6f}\nnDCG={:.6f}\n"
                         "e_cutoff={}\nmodels={}\nclasses={}\n",
                         report.nn, report.ft, report.st, report.e_measure, report.map, report.ndcg,
                         report.e_cutoff, data.size(), data.class_count()));

  std::string pr = "recall,precision\n";
  for (const auto& [recall, precision] : report.pr_curve)
    pr += fmt::format("{:.6f},{:.6f}\n", recall, precision);
  write_file(dir / "pr_curve.csv", pr);

  std::string cm = "class";
  for (const auto& name : data.class_names) cm += "," + name;
  cm += '\n';
  for (std::size_t i = 0; i < report.confusion.size(); ++i) {
    cm += data.class_names[i];
    for (auto count : report.confusion[i]) cm += fmt::format(",{}", count);
    cm += '\n';
  }
  write_file(dir / "confusion.csv", cm);

  const std::size_t n = report.tier_image.size();
  std::string ppm = fmt::format("P6\n{} {}\n255\n", n, n);
  for (const auto& row : report.tier_image) {
    for (Tier t : row) {
      switch (t) {
        case Tier::nn: ppm.append({'\x00', '\x00', '\x00'}); break;
        case Tier::ft: ppm.append({'\xff', '\x00', '\x00'}); break;
        case Tier::st: ppm.append({'\x00', '\x00', '\xff'}); break;
        case Tier::none: ppm.append({'\xff', '\xff', '\xff'}); break;
      }
    }
  }
  write_file(dir / "tier.ppm", ppm);
}

}  // namespace edgelbp
