#include <cmath>
#include <random>

#include "doctest.h"
#include "klrfs/error.hpp"
#include "klrfs/metrics.hpp"
#include "oracles.hpp"

using namespace klrfs;

TEST_CASE("auc examples") {
  const std::vector<double> s = {0.8, 0.6, 0.4, 0.2};
  const std::vector<int> y = {1, -1, 1, -1};
  CHECK(AucRoc(s, y) == 0.75);
  const std::vector<int> ordered = {1, 1, -1, -1};
  CHECK(AucRoc(s, ordered) == 1.0);
  const std::vector<int> reversed = {-1, -1, 1, 1};
  CHECK(AucRoc(s, reversed) == 0.0);
  const std::vector<double> flat = {0.3, 0.3, 0.3, 0.3};
  CHECK(AucRoc(flat, y) == 0.5);
  const std::vector<int> one = {1, 1, 1, 1};
  CHECK_THROWS_AS(AucRoc(s, one), Error);
  const std::vector<double> nan = {0.1, std::nan(""), 0.2, 0.3};
  CHECK_THROWS_AS(AucRoc(nan, y), Error);
}

TEST_CASE("auc matches pair counting and its invariances") {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> size(2, 12), level(0, 4), coin(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = size(rng);
    std::vector<int> y(static_cast<std::size_t>(m));
    for (int& v : y) v = coin(rng) ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    std::vector<double> s(static_cast<std::size_t>(m));
    for (double& v : s) v = level(rng) * 0.25;
    CHECK(AucRoc(s, y) == oracle::PairCountAuc(s, y));

    std::vector<double> mono(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) mono[i] = std::exp(3.0 * s[i]) - 7.0;
    CHECK(AucRoc(mono, y) == AucRoc(s, y));
  }
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<int> y = oracle::RandomLabels(10, rng);
    std::vector<double> s(10), neg(10);
    for (std::size_t i = 0; i < 10; ++i) {
      s[i] = g(rng);
      neg[i] = -s[i];
    }
    CHECK(AucRoc(neg, y) == doctest::Approx(1.0 - AucRoc(s, y)).epsilon(1e-15));
  }
}

TEST_CASE("red examples and invariances") {
  Matrix same(4, 2);
  same << 1, 1, 2, 2, 3, 3, 4, 4;
  CHECK(RedScore(same) == doctest::Approx(1.0).epsilon(1e-14));
  Matrix neg(4, 2);
  neg << 1, -1, 2, -2, 3, -3, 4, -4;
  CHECK(RedScore(neg) == doctest::Approx(1.0).epsilon(1e-14));

  // Gram-Schmidt against the centered first column gives correlation 0.
  Vector a(4), b(4);
  a << 1, 2, 3, 4;
  b << 1, -1, 1, -1;
  const Vector ac = a.array() - a.mean();
  Vector bc = b.array() - b.mean();
  bc -= (bc.dot(ac) / ac.dot(ac)) * ac;
  Matrix orth(4, 2);
  orth << a, bc;
  CHECK(std::abs(RedScore(orth)) < 1e-14);

  std::mt19937_64 rng(73);
  const Matrix x = oracle::RandomMatrix(15, 4, rng);
  Matrix scaled = x;
  scaled.col(2) = -3.0 * x.col(2).array() + 5.0;
  CHECK(RedScore(scaled) == doctest::Approx(RedScore(x)).epsilon(1e-12));
  Matrix swapped = x;
  swapped.col(0).swap(swapped.col(3));
  CHECK(RedScore(swapped) == doctest::Approx(RedScore(x)).epsilon(1e-12));
  CHECK(RedScore(x) >= 0.0);
  CHECK(RedScore(x) <= 1.0);

  CHECK_THROWS_AS(RedScore(x.leftCols(1)), Error);
  Matrix flat = x;
  flat.col(1).setConstant(2.0);
  try {
    RedScore(flat);
    FAIL("expected an error naming the column");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find('1') != std::string::npos);
  }
}

TEST_CASE("confusion counts") {
  const std::vector<double> s = {0.8, 0.6, 0.4, 0.2};
  const std::vector<int> y = {1, -1, 1, -1};
  ConfusionCounts c = Confusion(s, y, 0.5);
  CHECK(c.tp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 1);
  CHECK(c.fp == 1);
  c = Confusion(s, y, -1.0);
  CHECK(c.fn == 0);
  CHECK(c.tn == 0);
  c = Confusion(s, y, 2.0);
  CHECK(c.tp == 0);
  CHECK(c.fp == 0);
  c = Confusion(s, y, 0.6);  // equality counts as negative
  CHECK(c.fp == 0);
  CHECK(c.tp == 1);
}
