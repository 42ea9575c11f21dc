#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "edgelbp/errors.hpp"
#include "edgelbp/similarity.hpp"
#include "oracles.hpp"

using namespace edgelbp;

namespace {

HistogramMatrix row(std::initializer_list<double> values) {
  HistogramMatrix m(1, values.size());
  std::size_t i = 0;
  for (double v : values) m(0, i++) = v;
  return m;
}

Descriptor wrap(HistogramMatrix m, int samples) {
  Descriptor d;
  d.params.samples = samples;
  d.params.rings = static_cast<int>(m.rows());
  d.matrix = std::move(m);
  d.admissible_count = 1;
  return d;
}

}  // namespace

TEST(Bhattacharyya, IdenticalIsZeroDisjointIsOne) {
  const auto a = row({0.2, 0.3, 0.5, 0.0});
  EXPECT_EQ(bhattacharyya_distance(a, a), 0.0);
  EXPECT_NEAR(bhattacharyya_distance(row({0.5, 0.5, 0, 0}), row({0, 0, 0.25, 0.75})), 1.0, 1e-15);
}

TEST(Bhattacharyya, WorkedExampleAgainstHighPrecision) {
  const auto a = row({0.5, 0.5, 0, 0});
  const auto b = row({0.25, 0.75, 0, 0});
  const double direct = std::sqrt(1.0 - (std::sqrt(0.125) + std::sqrt(0.375)));
  EXPECT_NEAR(bhattacharyya_distance(a, b), direct, 1e-12);
  EXPECT_NEAR(bhattacharyya_distance(a, b), oracle::bhattacharyya_high_precision(a, b), 1e-12);
}

TEST(Bhattacharyya, RandomMatricesAgainstHighPrecision) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const auto a = oracle::random_stochastic(rng, 5, 16);
    const auto b = oracle::random_stochastic(rng, 5, 16);
    const double d = bhattacharyya_distance(a, b);
    EXPECT_NEAR(d, oracle::bhattacharyya_high_precision(a, b), 1e-7);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(Euclidean, Examples) {
  EXPECT_EQ(euclidean_distance(row({0.5, 0.5}), row({0.5, 0.5})), 0.0);
  EXPECT_NEAR(euclidean_distance(row({1, 0}), row({0, 1})), std::sqrt(2.0), 1e-15);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const auto a = oracle::random_stochastic(rng, 3, 7);
    const auto b = oracle::random_stochastic(rng, 3, 7);
    double sq = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 7; ++c) sq += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
    EXPECT_NEAR(euclidean_distance(a, b), std::sqrt(sq), 1e-15);
    EXPECT_LE(euclidean_distance(a, b), std::sqrt(2.0 * 3) + 1e-12);
  }
}

TEST(Emd, PointMassTranslation) {
  for (int k = 0; k < 6; ++k) {
    HistogramMatrix a(1, 6), b(1, 6);
    a(0, 0) = 1.0;
    b(0, k) = 1.0;
    EXPECT_EQ(emd_distance(a, b), static_cast<double>(k));
  }
}

TEST(Emd, MatchesTransportOracleOnSmallRows) {
  std::mt19937_64 rng(77);
  const std::int64_t unit = 60;
  for (int trial = 0; trial < 500; ++trial) {
    const int bins = 2 + static_cast<int>(rng() % 5);
    auto random_masses = [&] {
      std::vector<std::int64_t> m(static_cast<std::size_t>(bins), 0);
      for (std::int64_t left = unit; left > 0; --left) ++m[rng() % bins];
      return m;
    };
    const auto ma = random_masses();
    const auto mb = random_masses();
    HistogramMatrix a(1, static_cast<std::size_t>(bins)), b(1, static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
      a(0, i) = static_cast<double>(ma[i]) / unit;
      b(0, i) = static_cast<double>(mb[i]) / unit;
    }
    const double expected = static_cast<double>(oracle::transport_cost(ma, mb)) / unit;
    EXPECT_NEAR(emd_distance(a, b), expected, 1e-12);
  }
}

TEST(Distances, SymmetryIdentityAndTriangle) {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 300; ++i) {
    const auto a = oracle::random_stochastic(rng, 5, 16);
    const auto b = oracle::random_stochastic(rng, 5, 16);
    const auto c = oracle::random_stochastic(rng, 5, 16);
    for (Metric m : {Metric::bhattacharyya, Metric::euclidean, Metric::emd}) {
      EXPECT_EQ(distance(a, a, m), 0.0);
      EXPECT_NEAR(distance(a, b, m), distance(b, a, m), 1e-12);
    }
    for (Metric m : {Metric::euclidean, Metric::emd})
      EXPECT_LE(distance(a, c, m), distance(a, b, m) + distance(b, c, m) + 1e-12);
    EXPECT_LE(emd_distance(a, b), 15.0);
  }
}

TEST(Distances, IncompatibleShapesAndParams) {
  EXPECT_THROW(bhattacharyya_distance(row({1, 0}), row({1, 0, 0})), IncompatibleError);
  auto a = wrap(row({1, 0, 0, 0, 0}), 4);
  auto b = a;
  b.params.r_max = 0.05;
  EXPECT_THROW(distance(a, b, Metric::emd), IncompatibleError);
  EXPECT_EQ(distance(a, a, Metric::emd), 0.0);
}

TEST(DistanceMatrix, MatchesPairwiseCallsAndMirrors) {
  std::mt19937_64 rng(5);
  std::vector<Signature> items;
  for (int i = 0; i < 7; ++i)
    items.push_back({"m" + std::to_string(i), "k", oracle::random_stochastic(rng, 3, 8)});
  for (Metric metric : {Metric::bhattacharyya, Metric::euclidean, Metric::emd}) {
    const auto m = distance_matrix(items, metric, 3);
    const auto serial = distance_matrix_serial(items, metric);
    EXPECT_EQ(m.values, serial.values);
    for (std::size_t i = 0; i < items.size(); ++i) {
      EXPECT_EQ(m(i, i), 0.0);
      for (std::size_t j = 0; j < items.size(); ++j) {
        EXPECT_EQ(m(i, j), m(j, i));
        if (i != j) {
          EXPECT_EQ(m(i, j), distance(items[std::min(i, j)].matrix, items[std::max(i, j)].matrix, metric));
        }
      }
    }
  }
}

TEST(DistanceMatrix, TwoIdenticalDescriptors) {
  std::vector<Descriptor> ds{wrap(row({0.5, 0.5, 0, 0, 0}), 4), wrap(row({0.5, 0.5, 0, 0, 0}), 4)};
  const auto m = distance_matrix(std::span<const Descriptor>(ds), Metric::bhattacharyya, 1);
  EXPECT_EQ(m.values, std::vector<double>(4, 0.0));
  EXPECT_EQ(m.labels, (std::vector<std::string>{"0", "1"}));
}

TEST(DistanceMatrix, PermutationEquivariance) {
  std::mt19937_64 rng(8);
  std::vector<Signature> items;
  for (int i = 0; i < 6; ++i) items.push_back({std::to_string(i), "k", oracle::random_stochastic(rng, 2, 5)});
  std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  std::vector<Signature> shuffled;
  for (auto p : perm) shuffled.push_back(items[p]);
  const auto a = distance_matrix(items, Metric::emd, 2);
  const auto b = distance_matrix(shuffled, Metric::emd, 2);
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_EQ(b(i, j), a(perm[i], perm[j]));
}

TEST(DistanceMatrix, IncompatibleItemNamesBothLabels) {
  std::vector<Signature> items{{"alpha", "edgelbp 15 5 0.1 cielab_l 1", row({1, 0})},
                               {"beta", "edgelbp 15 5 0.2 cielab_l 1", row({1, 0})}};
  try {
    distance_matrix(items, Metric::bhattacharyya, 1);
    FAIL() << "expected IncompatibleError";
  } catch (const IncompatibleError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("alpha"), std::string::npos);
    EXPECT_NE(what.find("beta"), std::string::npos);
  }
}

TEST(DistanceMatrixFormat, RoundTripAndErrors) {
  std::mt19937_64 rng(9);
  std::vector<Signature> items;
  for (int i = 0; i < 4; ++i) items.push_back({"s" + std::to_string(i), "k", oracle::random_stochastic(rng, 2, 4)});
  const auto m = distance_matrix(items, Metric::bhattacharyya, 1);
  std::stringstream buf;
  write_distance_matrix(buf, m);
  const auto back = read_distance_matrix(buf);
  EXPECT_EQ(back.labels, m.labels);
  for (std::size_t i = 0; i < m.values.size(); ++i) EXPECT_NEAR(back.values[i], m.values[i], 1e-12);

  std::istringstream short_row("a,b\n0,1\n1\n");
  EXPECT_THROW(read_distance_matrix(short_row), ParseError);
  std::istringstream bad_value("a,b\n0,x\n1,0\n");
  EXPECT_THROW(read_distance_matrix(bad_value), ParseError);
  std::istringstream empty("");
  EXPECT_THROW(read_distance_matrix(empty), ParseError);
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric("bha"), Metric::bhattacharyya);
  EXPECT_EQ(parse_metric("euc"), Metric::euclidean);
  EXPECT_EQ(parse_metric("emd"), Metric::emd);
  EXPECT_THROW(parse_metric("cosine"), std::invalid_argument);
}
