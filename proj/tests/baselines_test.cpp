#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "doctest.h"
#include "klrfs/baselines.hpp"
#include "klrfs/error.hpp"
#include "oracles.hpp"

using namespace klrfs;

namespace {

DataMatrix MakeData(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  DataMatrix d;
  d.values = oracle::RandomMatrix(m, n, rng);
  d.labels = oracle::RandomLabels(static_cast<std::size_t>(m), rng);
  for (Index f = 0; f < n; ++f) d.feature_names.push_back("f" + std::to_string(f));
  return d;
}

}  // namespace

TEST_CASE("anova ranks the label column first and constants last") {
  DataMatrix d = MakeData(40, 5, 81);
  for (Index i = 0; i < 40; ++i) d.values(i, 2) = d.labels[static_cast<std::size_t>(i)] + 0.3 * d.values(i, 2);
  d.values.col(4).setConstant(1.0);
  // Column 1 is a label-permuted copy of column 2.
  std::vector<Index> perm(40);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (Index i = 0; i < 40; ++i) d.values(i, 1) = d.values(perm[static_cast<std::size_t>(i)], 2);

  const FeatureRanking r = AnovaRank(d);
  CHECK(r.method == "anova");
  CHECK(r.order.front() == 2);
  CHECK(r.order.back() == 4);
  CHECK(r.scores[4] == 0.0);
  CHECK(r.scores[1] < r.scores[2]);

  // Two-group F equals the squared pooled t statistic.
  std::vector<double> a, b;
  for (Index i = 0; i < 40; ++i) (d.labels[static_cast<std::size_t>(i)] == 1 ? a : b).push_back(d.values(i, 0));
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  auto ss = [&](const std::vector<double>& v) {
    const double mu = mean(v);
    double s = 0.0;
    for (double t : v) s += (t - mu) * (t - mu);
    return s;
  };
  const double pooled = (ss(a) + ss(b)) / (a.size() + b.size() - 2.0);
  const double t = (mean(a) - mean(b)) / std::sqrt(pooled * (1.0 / a.size() + 1.0 / b.size()));
  CHECK(r.scores[0] == doctest::Approx(t * t).epsilon(1e-10));

  DataMatrix scaled = d;
  scaled.values.col(0) = 4.0 * d.values.col(0).array() - 2.0;
  scaled.values.col(3) = -0.5 * d.values.col(3).array() + 1.0;
  CHECK(AnovaRank(scaled).order == r.order);
}

TEST_CASE("anova: separated constant groups score +inf") {
  DataMatrix d = MakeData(6, 2, 83);
  d.labels = {1, 1, 1, -1, -1, -1};
  d.values.col(0) << 1, 1, 1, 0, 0, 0;
  const FeatureRanking r = AnovaRank(d);
  CHECK(std::isinf(r.scores[0]));
  CHECK(r.order.front() == 0);
  d.labels = {1, -1, -1, -1, -1, -1};
  CHECK_THROWS_AS(AnovaRank(d), Error);
}

TEST_CASE("order_by_score breaks ties by index and sinks NaN") {
  const std::vector<double> s = {1.0, std::nan(""), 3.0, 1.0};
  CHECK(OrderByScore(s) == std::vector<Index>{2, 0, 3, 1});
}

TEST_CASE("svm-rfe returns p_select survivors and a full order") {
  const DataMatrix d = MakeData(30, 8, 85);
  for (double frac : {0.05, 0.1, 0.3, 0.6}) {
    const FeatureRanking r = SvmRfe(d, {.p_select = 3, .C = 1.0, .drop_fraction = frac});
    CHECK(r.order.size() == 8);
    std::vector<Index> sorted = r.order;
    std::sort(sorted.begin(), sorted.end());
    for (Index k = 0; k < 8; ++k) CHECK(sorted[static_cast<std::size_t>(k)] == k);
    CHECK(r.Top(3).size() == 3);
    for (std::size_t k = 1; k < r.order.size(); ++k) {
      CHECK(r.scores[static_cast<std::size_t>(r.order[k - 1])] > r.scores[static_cast<std::size_t>(r.order[k])]);
    }
  }
  const FeatureRanking all = SvmRfe(d, {.p_select = 8});
  CHECK(all.order.size() == 8);
  CHECK(RfeRounds(8, 8, 0.1) == 1);
  CHECK_THROWS_AS(SvmRfe(d, {.p_select = 9}), Error);
  CHECK_THROWS_AS(SvmRfe(d, {.p_select = 2, .drop_fraction = 1.0}), Error);
}

TEST_CASE("svm-rfe elimination count") {
  // One feature leaves per round on n = 3: 3 - p_select eliminations plus
  // the final fit on the survivors.
  CHECK(RfeRounds(3, 1, 0.2) - 1 == 2);
  CHECK(RfeRounds(3, 2, 0.2) - 1 == 1);
  CHECK(RfeRounds(100, 10, 0.1) > 1);
}

TEST_CASE("svm-rfe keeps a perfectly separating feature") {
  int kept = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    DataMatrix d = MakeData(60, 21, 200 + seed);
    for (Index i = 0; i < 60; ++i) d.values(i, 5) = d.labels[static_cast<std::size_t>(i)] * (1.0 + 0.1 * std::abs(d.values(i, 5)));
    const FeatureRanking r = SvmRfe(d, {.p_select = 3, .C = 1.0, .drop_fraction = 0.1});
    const auto top = r.Top(3);
    if (std::find(top.begin(), top.end(), std::size_t{5}) != top.end()) ++kept;
  }
  CHECK(kept >= 4);
}

TEST_CASE("external ranking file") {
  const auto dir = std::filesystem::temp_directory_path() / "klrfs_rank_test";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> names = {"a", "b", "c"};
  const auto path = (dir / "rank.txt").string();
  {
    std::ofstream out(path);
    out << "c\n\n  a \r\n";
  }
  const FeatureRanking r = LoadExternalRanking(path, names);
  CHECK(r.order == std::vector<Index>{2, 0});
  CHECK(r.method == "external");
  {
    std::ofstream out(path);
    out << "c\nzzz\n";
  }
  try {
    LoadExternalRanking(path, names);
    FAIL("expected unknown feature error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kData);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  {
    std::ofstream out(path);
    out << "a\na\n";
  }
  CHECK_THROWS_AS(LoadExternalRanking(path, names), Error);
  CHECK_THROWS_AS(LoadExternalRanking((dir / "missing.txt").string(), names), Error);
  std::filesystem::remove_all(dir);
}
