#include "klrfs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "klrfs/error.hpp"

namespace klrfs {

namespace {

std::vector<std::size_t> Iota(Index n) {
  std::vector<std::size_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

void RequireFinite(const Matrix& m, const char* what) {
  if (!m.allFinite()) Fail(ErrorKind::kData, std::string(what) + " contains non-finite values");
}

void RequireSameShape(const GramMatrix& a, const GramMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    Fail(ErrorKind::kData, "kernel shape mismatch: " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                               "x" + std::to_string(b.cols()));
  }
}

double SquaredDistance(const Matrix& a, Index i, const Matrix& b, Index j) {
  double acc = 0.0;
  for (Index f = 0; f < a.cols(); ++f) {
    const double d = a(i, f) - b(j, f);
    acc += d * d;
  }
  return acc;
}

}  // namespace

void DataMatrix::Validate() const {
  if (values.rows() < 2) Fail(ErrorKind::kData, "need at least 2 samples");
  if (values.cols() < 1) Fail(ErrorKind::kData, "need at least 1 feature");
  if (static_cast<Index>(labels.size()) != values.rows()) {
    Fail(ErrorKind::kData, "label count " + std::to_string(labels.size()) +
                               " does not match sample count " + std::to_string(values.rows()));
  }
  if (!feature_names.empty() && static_cast<Index>(feature_names.size()) != values.cols()) {
    Fail(ErrorKind::kData, "feature name count does not match feature count");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1) {
      Fail(ErrorKind::kData, "label at row " + std::to_string(i) + " is not +1/-1");
    }
  }
  RequireFinite(values, "data matrix");
}

DataMatrix DataMatrix::SelectRows(std::span<const std::size_t> rows) const {
  DataMatrix out;
  out.values.resize(static_cast<Index>(rows.size()), values.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= static_cast<std::size_t>(values.rows())) Fail(ErrorKind::kData, "row index out of range");
    out.values.row(static_cast<Index>(r)) = values.row(static_cast<Index>(rows[r]));
    out.labels.push_back(labels[rows[r]]);
  }
  out.feature_names = feature_names;
  return out;
}

DataMatrix DataMatrix::SelectColumns(std::span<const std::size_t> cols) const {
  DataMatrix out;
  out.values.resize(values.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= static_cast<std::size_t>(values.cols())) {
      Fail(ErrorKind::kData, "feature column " + std::to_string(cols[c]) + " out of range");
    }
    out.values.col(static_cast<Index>(c)) = values.col(static_cast<Index>(cols[c]));
    if (!feature_names.empty()) out.feature_names.push_back(feature_names[cols[c]]);
  }
  out.labels = labels;
  return out;
}

GramMatrix GramMatrix::Square(Matrix entries) {
  GramMatrix g;
  g.row_ids = Iota(entries.rows());
  g.col_ids = Iota(entries.cols());
  g.entries = std::move(entries);
  g.kind = GramKind::kSquare;
  return g;
}

GramMatrix GramMatrix::Cross(Matrix entries) {
  GramMatrix g = Square(std::move(entries));
  g.kind = GramKind::kCross;
  return g;
}

GramMatrix RbfGram(const Matrix& rows, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    Fail(ErrorKind::kParameter, "RBF gamma must be positive and finite, got " + std::to_string(gamma));
  }
  RequireFinite(rows, "RBF input");
  const Index m = rows.rows();
  Matrix k(m, m);
  for (Index j = 0; j < m; ++j) {
    k(j, j) = 1.0;
    for (Index i = j + 1; i < m; ++i) {
      const double v = std::exp(-gamma * SquaredDistance(rows, i, rows, j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return GramMatrix::Square(std::move(k));
}

GramMatrix RbfCross(const Matrix& test, const Matrix& train, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    Fail(ErrorKind::kParameter, "RBF gamma must be positive and finite, got " + std::to_string(gamma));
  }
  if (test.cols() != train.cols()) {
    Fail(ErrorKind::kData, "cross kernel dimension mismatch: " + std::to_string(test.cols()) +
                               " vs " + std::to_string(train.cols()) + " features");
  }
  RequireFinite(test, "RBF test input");
  RequireFinite(train, "RBF train input");
  Matrix k(test.rows(), train.rows());
  for (Index j = 0; j < train.rows(); ++j) {
    for (Index i = 0; i < test.rows(); ++i) {
      k(i, j) = std::exp(-gamma * SquaredDistance(test, i, train, j));
    }
  }
  return GramMatrix::Cross(std::move(k));
}

GramMatrix LinearGram(const Matrix& rows) {
  RequireFinite(rows, "linear kernel input");
  Matrix k = rows * rows.transpose();
  // Force exact symmetry; the product may differ in the last bit.
  k = (0.5 * (k + k.transpose())).eval();
  return GramMatrix::Square(std::move(k));
}

GramMatrix LinearCross(const Matrix& test, const Matrix& train) {
  if (test.cols() != train.cols()) Fail(ErrorKind::kData, "cross kernel dimension mismatch");
  return GramMatrix::Cross(test * train.transpose());
}

double FrobeniusInner(const GramMatrix& a, const GramMatrix& b) {
  RequireSameShape(a, b);
  return a.entries.cwiseProduct(b.entries).sum();
}

double Alignment(const GramMatrix& a, const GramMatrix& b) {
  RequireSameShape(a, b);
  const double aa = FrobeniusInner(a, a);
  const double bb = FrobeniusInner(b, b);
  if (!(aa > 0.0) || !(bb > 0.0)) Fail(ErrorKind::kDegenerate, "alignment of a zero-norm kernel");
  const double v = FrobeniusInner(a, b) / std::sqrt(aa * bb);
  return std::clamp(v, -1.0, 1.0);
}

GramMatrix TargetFromLabels(std::span<const int> labels) {
  const auto m = static_cast<Index>(labels.size());
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else Fail(ErrorKind::kData, "labels must be +1/-1");
  }
  if (!has_pos || !has_neg) Fail(ErrorKind::kDegenerate, "target kernel needs both classes");
  Matrix t(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < m; ++i) t(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
  }
  return GramMatrix::Square(std::move(t));
}

double Kta(const GramMatrix& k, const GramMatrix& target) { return Alignment(k, target); }

GramMatrix CenterKernel(const GramMatrix& k) {
  if (k.rows() != k.cols()) Fail(ErrorKind::kData, "centering needs a square kernel");
  const Vector col_means = k.entries.colwise().mean().transpose();
  const Vector row_means = k.entries.rowwise().mean();
  const double grand = k.entries.mean();
  Matrix c = k.entries;
  c.colwise() -= row_means;
  c.rowwise() -= col_means.transpose();
  c.array() += grand;
  GramMatrix out = k;
  out.entries = std::move(c);
  return out;
}

double RelativeMinEigenvalue(const GramMatrix& k) {
  if (k.rows() != k.cols()) Fail(ErrorKind::kData, "eigenvalues need a square kernel");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(k.entries, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  return ev.minCoeff() / top;
}

bool IsNumericallyPsd(const GramMatrix& k, double tolerance) {
  return RelativeMinEigenvalue(k) >= -tolerance;
}

double MedianHeuristicGamma(const Matrix& rows) {
  const Index m = rows.rows();
  if (m < 2) Fail(ErrorKind::kDegenerate, "median heuristic needs at least 2 points");
  std::vector<double> d2;
  d2.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Index i = 0; i < m; ++i) {
    for (Index j = i + 1; j < m; ++j) d2.push_back(SquaredDistance(rows, i, rows, j));
  }
  // Median of an even count is the mean of the two middle values.
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  double median = d2[mid];
  if (d2.size() % 2 == 0) {
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) Fail(ErrorKind::kDegenerate, "median pairwise distance is zero");
  return 1.0 / median;
}

}  // namespace klrfs
