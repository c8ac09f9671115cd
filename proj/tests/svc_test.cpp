#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "klrfs/error.hpp"
#include "klrfs/svc.hpp"
#include "oracles.hpp"

using namespace klrfs;

namespace {

void CheckFeasible(const SvcModel& model, std::span<const int> y) {
  double eq = 0.0;
  for (Index i = 0; i < model.alpha.size(); ++i) {
    CHECK(model.alpha(i) >= 0.0);
    CHECK(model.alpha(i) <= model.C);
    eq += model.alpha(i) * y[static_cast<std::size_t>(i)];
  }
  CHECK(std::abs(eq) < 1e-8);
}

double HingeLoss(const SvcModel& model, const GramMatrix& k, std::span<const int> y) {
  const std::vector<double> f = DecisionValues(model, k);
  double loss = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) loss += std::max(0.0, 1.0 - y[i] * f[i]);
  return loss;
}

}  // namespace

TEST_CASE("two-point problem has the analytic solution") {
  Matrix x(2, 1);
  x << -1.0, 1.0;
  const std::vector<int> y = {-1, 1};
  const GramMatrix k = LinearGram(x);
  const SvcModel model = FitSvc(k, y, {.C = 100.0, .tol = 1e-10});
  // alpha = 1/2 for both, w = 1, b = 0.
  CHECK(model.alpha(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.alpha(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(model.bias) < 1e-12);
  Matrix probe(3, 1);
  probe << 0.0, -1.0, 1.0;
  const std::vector<double> f = DecisionValues(model, LinearCross(probe, x));
  CHECK(std::abs(f[0]) < 1e-12);
  CHECK(f[1] < 0.0);
  CHECK(f[2] > 0.0);
  CHECK(f[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ideal kernel separates the training set") {
  std::mt19937_64 rng(61);
  const std::vector<int> y = oracle::RandomLabels(20, rng);
  const GramMatrix k = TargetFromLabels(y);
  const SvcModel model = FitSvc(k, y, {.C = 10.0});
  const std::vector<double> f = DecisionValues(model, k);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(f[i] * y[i] > 0.0);
  CheckFeasible(model, y);
}

TEST_CASE("KKT, feasibility and the naive decision oracle") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = oracle::RandomMatrix(30, 3, rng);
    std::vector<int> y = oracle::RandomLabels(30, rng);
    const GramMatrix k = RbfGram(x, 0.5);
    const SvcModel model = FitSvc(k, y, {.C = 1.0, .tol = 1e-3});
    CheckFeasible(model, y);
    CHECK(model.kkt_gap < 1e-3);
    CHECK(KktViolation(model, k, y) < 1e-3);
    CHECK_FALSE(model.non_psd_warning);
    for (std::size_t s : model.support_indices) CHECK(model.alpha(static_cast<Index>(s)) > 0.0);

    const Matrix test = oracle::RandomMatrix(5, 3, rng);
    const GramMatrix cross = RbfCross(test, x, 0.5);
    const std::vector<double> f = DecisionValues(model, cross);
    for (Index r = 0; r < 5; ++r) {
      double acc = model.bias;
      for (Index i = 0; i < 30; ++i) acc += model.alpha(i) * y[static_cast<std::size_t>(i)] * cross.entries(r, i);
      CHECK(std::abs(f[static_cast<std::size_t>(r)] - acc) < 1e-10);
    }

    // A duplicate of a training point scores like that training point.
    const std::vector<double> train_f = DecisionValues(model, k);
    const std::vector<double> dup = DecisionValues(model, RbfCross(x.row(7), x, 0.5));
    CHECK(dup[0] == doctest::Approx(train_f[7]).epsilon(1e-12));
  }
}

TEST_CASE("decision values: zero rows and zero coefficients give the bias") {
  SvcModel model;
  model.alpha = Vector::Zero(3);
  model.dual_coefs = Vector::Zero(3);
  model.bias = 0.25;
  std::vector<double> f = DecisionValues(model, GramMatrix::Cross(Matrix::Ones(2, 3)));
  CHECK(f == std::vector<double>{0.25, 0.25});
  model.dual_coefs << 1.0, -2.0, 1.0;
  f = DecisionValues(model, GramMatrix::Cross(Matrix::Zero(1, 3)));
  CHECK(f[0] == 0.25);
  CHECK_THROWS_AS(DecisionValues(model, GramMatrix::Cross(Matrix::Zero(1, 4))), Error);
}

TEST_CASE("hinge loss does not increase with C") {
  std::mt19937_64 rng(65);
  const Matrix x = oracle::RandomMatrix(24, 2, rng);
  const std::vector<int> y = oracle::RandomLabels(24, rng);
  const GramMatrix k = RbfGram(x, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double loss = HingeLoss(FitSvc(k, y, {.C = c, .tol = 1e-6}), k, y);
    CHECK(loss <= prev + 1e-4);
    prev = loss;
  }
}

TEST_CASE("precomputed linear kernel matches a direct linear SVM") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix x = oracle::RandomMatrix(20, 3, rng);
    const std::vector<int> y = oracle::RandomLabels(20, rng);
    const SvcModel model = FitSvc(LinearGram(x), y, {.C = 1.0, .tol = 1e-9});
    const oracle::LinearSvm ref = oracle::SolveLinearSvm(x, y, 1.0);
    const Matrix test = oracle::RandomMatrix(8, 3, rng);
    const std::vector<double> f = DecisionValues(model, LinearCross(test, x));
    const Vector g = (test * ref.w).array() + ref.b;
    for (Index r = 0; r < 8; ++r) CHECK(std::abs(f[static_cast<std::size_t>(r)] - g(r)) < 1e-4);
    CHECK((LinearWeights(model, x) - ref.w).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("svc errors and warnings") {
  const GramMatrix k = GramMatrix::Square(Matrix::Identity(3, 3));
  const std::vector<int> same = {1, 1, 1};
  try {
    FitSvc(k, same);
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerate);
  }
  const std::vector<int> y = {1, -1, 1};
  CHECK_THROWS_AS(FitSvc(k, y, {.C = 0.0}), Error);
  CHECK_THROWS_AS(FitSvc(k, std::vector<int>{1, -1}), Error);

  Matrix bad = Matrix::Identity(3, 3);
  bad(0, 1) = bad(1, 0) = 2.0;  // indefinite
  const SvcModel model = FitSvc(GramMatrix::Square(bad), y, {.C = 1.0});
  CHECK(model.non_psd_warning);

  Matrix x(4, 1);
  x << 0.0, 1.0, 2.0, 3.0;
  const std::vector<int> y4 = {1, -1, 1, -1};
  try {
    FitSvc(LinearGram(x), y4, {.C = 1e6, .tol = 1e-12, .max_iter_factor = 0});
    FAIL("expected the iteration cap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
  }
}
