#pragma once

#include <cstddef>
#include <span>

#include "klrfs/kernel.hpp"

namespace klrfs {

struct ConfusionCounts {
  std::size_t tp = 0, fn = 0, tn = 0, fp = 0;
};

// Mann-Whitney AUC: P(score of a positive > score of a negative), ties
// credited 1/2. Requires both classes.
double AucRoc(std::span<const double> scores, std::span<const int> labels);

// Mean absolute Pearson correlation over all pairs of distinct columns.
// Needs at least two columns, none with zero variance.
double RedScore(const Matrix& columns);

// Predicts positive when score > threshold.
ConfusionCounts Confusion(std::span<const double> scores, std::span<const int> labels, double threshold);

}  // namespace klrfs
