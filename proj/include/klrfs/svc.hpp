#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "klrfs/kernel.hpp"

namespace klrfs {

struct SvcOptions {
  double C = 1.0;
  double tol = 1e-3;  // stop when the maximal KKT violation drops below this
  // Pair updates allowed are max_iter_factor * m^2.
  std::size_t max_iter_factor = 100;
};

// Soft-margin SVM over a precomputed kernel:
// f(x) = sum_i alpha_i y_i k(x, x_i) + b.
struct SvcModel {
  Vector alpha;        // dual variables, 0 <= alpha_i <= C
  Vector dual_coefs;   // alpha_i * y_i
  double bias = 0.0;
  std::vector<std::size_t> support_indices;
  double C = 1.0;
  double tolerance = 1e-3;
  double kkt_gap = 0.0;         // m(alpha) - M(alpha) at termination
  std::size_t iterations = 0;
  bool non_psd_warning = false;  // kernel failed the numerical PSD check

  Index train_samples() const { return dual_coefs.size(); }
};

// Solves the dual with SMO, choosing the maximal violating pair each step.
// Throws kDegenerate for single-class labels and kNumerical when the
// iteration cap is reached.
SvcModel FitSvc(const GramMatrix& k_train, std::span<const int> labels, const SvcOptions& options = {});

std::vector<double> DecisionValues(const SvcModel& model, const GramMatrix& k_cross);

// Maximal KKT violation m(alpha) - M(alpha) of a model on its training kernel.
double KktViolation(const SvcModel& model, const GramMatrix& k_train, std::span<const int> labels);

// Primal weight vector sum_i alpha_i y_i x_i of a model fit on a linear kernel.
Vector LinearWeights(const SvcModel& model, const Matrix& x_train);

}  // namespace klrfs
