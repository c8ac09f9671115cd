#include "klrfs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "klrfs/error.hpp"

namespace klrfs {

double AucRoc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) Fail(ErrorKind::kData, "AUC: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) {
    if (y == 1) ++n_pos;
    else if (y != -1) Fail(ErrorKind::kData, "AUC: labels must be +1/-1");
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) Fail(ErrorKind::kDegenerate, "AUC is undefined with a single class");
  for (double s : scores) {
    if (std::isnan(s)) Fail(ErrorKind::kData, "AUC: NaN score");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Twice the rank sum of positives, with tied groups sharing their
  // average rank; kept doubled so every term is an exact integer.
  double twice_rank_sum = 0.0;
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && scores[order[hi]] == scores[order[lo]]) ++hi;
    const double twice_avg_rank = static_cast<double>(lo + 1 + hi);  // (lo+1) + hi
    for (std::size_t k = lo; k < hi; ++k) {
      if (labels[order[k]] == 1) twice_rank_sum += twice_avg_rank;
    }
    lo = hi;
  }
  const double p = static_cast<double>(n_pos);
  const double twice_u = twice_rank_sum - p * (p + 1.0);
  return (twice_u / 2.0) / (p * static_cast<double>(n_neg));
}

double RedScore(const Matrix& columns) {
  const Index p = columns.cols();
  if (p < 2) Fail(ErrorKind::kDegenerate, "RED needs at least two selected features");
  if (columns.rows() < 2) Fail(ErrorKind::kDegenerate, "RED needs at least two samples");
  Matrix centered = columns.rowwise() - columns.colwise().mean();
  Vector norms = centered.colwise().norm().transpose();
  for (Index j = 0; j < p; ++j) {
    if (!(norms(j) > 0.0)) {
      Fail(ErrorKind::kDegenerate, "RED: column " + std::to_string(j) + " has zero variance");
    }
  }
  double acc = 0.0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double rho = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
      acc += std::min(1.0, std::abs(rho));
    }
  }
  // The sum over ordered pairs i != j is twice the unordered sum.
  return 2.0 * acc / static_cast<double>(p * (p - 1));
}

ConfusionCounts Confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) Fail(ErrorKind::kData, "confusion: scores and labels differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_pos = scores[i] > threshold;
    if (labels[i] == 1) {
      predicted_pos ? ++c.tp : ++c.fn;
    } else {
      predicted_pos ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

}  // namespace klrfs
