#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace klrfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Samples x features with binary labels in {-1, +1}.
struct DataMatrix {
  Matrix values;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  Index samples() const { return values.rows(); }
  Index features() const { return values.cols(); }

  // Throws kData unless m >= 2, n >= 1, shapes agree, labels are +-1 and
  // every value is finite.
  void Validate() const;

  DataMatrix SelectRows(std::span<const std::size_t> rows) const;
  DataMatrix SelectColumns(std::span<const std::size_t> cols) const;
};

enum class GramKind { kSquare, kCross };

// Pairwise similarities between two sample sets. Square matrices pair a set
// with itself.
struct GramMatrix {
  Matrix entries;
  GramKind kind = GramKind::kSquare;
  std::vector<std::size_t> row_ids;
  std::vector<std::size_t> col_ids;

  static GramMatrix Square(Matrix entries);
  static GramMatrix Cross(Matrix entries);

  Index rows() const { return entries.rows(); }
  Index cols() const { return entries.cols(); }
};

// exp(-gamma * ||x_i - x_j||^2) over the rows of `rows`. The diagonal is
// exactly 1 and the result is exactly symmetric.
GramMatrix RbfGram(const Matrix& rows, double gamma);

// Entry (i, j) = exp(-gamma * ||test_i - train_j||^2).
GramMatrix RbfCross(const Matrix& test, const Matrix& train, double gamma);

// Linear kernel X X^T; used by SVM-RFE and by the KPCA/PCA cross-checks.
GramMatrix LinearGram(const Matrix& rows);
GramMatrix LinearCross(const Matrix& test, const Matrix& train);

double FrobeniusInner(const GramMatrix& a, const GramMatrix& b);

// Uncentered Frobenius cosine <a,b>_F / sqrt(<a,a>_F <b,b>_F). Throws
// kDegenerate when either argument has zero norm.
double Alignment(const GramMatrix& a, const GramMatrix& b);

// Ideal target: 1 where the labels agree, 0 otherwise. Both classes must be
// present.
GramMatrix TargetFromLabels(std::span<const int> labels);

// Kernel target alignment, i.e. Alignment(k, target).
double Kta(const GramMatrix& k, const GramMatrix& target);

// Double centering K - 1K - K1 + 1K1 with 1 the m x m matrix of 1/m.
GramMatrix CenterKernel(const GramMatrix& k);

// Smallest eigenvalue relative to the largest one; the PSD check accepts
// values >= -tolerance.
double RelativeMinEigenvalue(const GramMatrix& k);
bool IsNumericallyPsd(const GramMatrix& k, double tolerance = 1e-8);

// 1 / median of the pairwise squared distances between distinct rows.
// Throws kDegenerate if that median is 0.
double MedianHeuristicGamma(const Matrix& rows);

}  // namespace klrfs
