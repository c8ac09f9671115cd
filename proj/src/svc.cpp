#include "klrfs/svc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klrfs/error.hpp"

namespace klrfs {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool InUpSet(double alpha, int y, double c) { return (y == 1 && alpha < c) || (y == -1 && alpha > 0.0); }
bool InLowSet(double alpha, int y, double c) { return (y == -1 && alpha < c) || (y == 1 && alpha > 0.0); }

struct Violation {
  double up = -kInf;   // max over I_up of -y G
  double low = kInf;   // min over I_low of -y G
  Index i = -1;
  Index j = -1;
};

Violation FindViolation(const Vector& alpha, const Vector& grad, std::span<const int> y, double c) {
  Violation v;
  for (Index t = 0; t < alpha.size(); ++t) {
    const double s = -y[static_cast<std::size_t>(t)] * grad(t);
    if (InUpSet(alpha(t), y[static_cast<std::size_t>(t)], c) && s > v.up) {
      v.up = s;
      v.i = t;
    }
    if (InLowSet(alpha(t), y[static_cast<std::size_t>(t)], c) && s < v.low) {
      v.low = s;
      v.j = t;
    }
  }
  return v;
}

void CheckLabels(std::span<const int> labels, Index m) {
  if (static_cast<Index>(labels.size()) != m) Fail(ErrorKind::kData, "label count does not match kernel size");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else Fail(ErrorKind::kData, "labels must be +1/-1");
  }
  if (!pos || !neg) Fail(ErrorKind::kDegenerate, "SVM training needs both classes");
}

}  // namespace

SvcModel FitSvc(const GramMatrix& k_train, std::span<const int> labels, const SvcOptions& options) {
  const Index m = k_train.rows();
  if (m != k_train.cols()) Fail(ErrorKind::kData, "SVM training kernel must be square");
  CheckLabels(labels, m);
  if (!(options.C > 0.0) || !std::isfinite(options.C)) Fail(ErrorKind::kParameter, "C must be positive");
  if (!(options.tol > 0.0)) Fail(ErrorKind::kParameter, "SVM tolerance must be positive");
  if (!k_train.entries.allFinite()) Fail(ErrorKind::kData, "SVM kernel contains non-finite values");

  const double c = options.C;
  const Matrix& k = k_train.entries;
  auto y = [&](Index t) { return static_cast<double>(labels[static_cast<std::size_t>(t)]); };

  SvcModel model;
  model.C = c;
  model.tolerance = options.tol;
  model.non_psd_warning = !IsNumericallyPsd(k_train);

  Vector alpha = Vector::Zero(m);
  Vector grad = Vector::Constant(m, -1.0);  // Q alpha - e

  const std::size_t cap = options.max_iter_factor * static_cast<std::size_t>(m) * static_cast<std::size_t>(m);
  std::size_t iter = 0;
  Violation v = FindViolation(alpha, grad, labels, c);
  while (v.up - v.low >= options.tol) {
    if (iter >= cap) {
      Fail(ErrorKind::kNumerical, "SMO did not converge within " + std::to_string(cap) + " pair updates");
    }
    ++iter;
    const Index i = v.i, j = v.j;
    const double yi = y(i), yj = y(j);
    const double qij = yi * yj * k(i, j);
    const double old_i = alpha(i), old_j = alpha(j);

    if (yi != yj) {
      double quad = k(i, i) + k(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0.0) {
        if (alpha(j) < 0.0) { alpha(j) = 0.0; alpha(i) = diff; }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0; alpha(j) = -diff;
      }
      if (diff > 0.0) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = c - diff; }
      } else if (alpha(j) > c) {
        alpha(j) = c; alpha(i) = c + diff;
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) { alpha(i) = c; alpha(j) = sum - c; }
      } else if (alpha(j) < 0.0) {
        alpha(j) = 0.0; alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) { alpha(j) = c; alpha(i) = sum - c; }
      } else if (alpha(i) < 0.0) {
        alpha(i) = 0.0; alpha(j) = sum;
      }
    }

    const double di = alpha(i) - old_i, dj = alpha(j) - old_j;
    for (Index t = 0; t < m; ++t) {
      grad(t) += y(t) * (yi * k(t, i) * di + yj * k(t, j) * dj);
    }
    v = FindViolation(alpha, grad, labels, c);
  }

  model.alpha = alpha;
  model.iterations = iter;
  model.kkt_gap = std::max(0.0, v.up - v.low);
  model.dual_coefs.resize(m);
  for (Index t = 0; t < m; ++t) {
    model.dual_coefs(t) = alpha(t) * y(t);
    if (alpha(t) > 0.0) model.support_indices.push_back(static_cast<std::size_t>(t));
  }

  // b averaged over free support vectors; without any, the midpoint of the
  // feasible interval [M, m].
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (Index t = 0; t < m; ++t) {
    if (alpha(t) > 0.0 && alpha(t) < c) {
      free_sum += -y(t) * grad(t);
      ++free_count;
    }
  }
  if (free_count > 0) {
    model.bias = free_sum / static_cast<double>(free_count);
  } else {
    const double up = std::isfinite(v.up) ? v.up : v.low;
    const double low = std::isfinite(v.low) ? v.low : v.up;
    model.bias = 0.5 * (up + low);
  }
  return model;
}

std::vector<double> DecisionValues(const SvcModel& model, const GramMatrix& k_cross) {
  if (k_cross.cols() != model.train_samples()) {
    Fail(ErrorKind::kData, "cross kernel has " + std::to_string(k_cross.cols()) + " columns, model has " +
                               std::to_string(model.train_samples()) + " training samples");
  }
  const Vector f = (k_cross.entries * model.dual_coefs).array() + model.bias;
  return std::vector<double>(f.data(), f.data() + f.size());
}

double KktViolation(const SvcModel& model, const GramMatrix& k_train, std::span<const int> labels) {
  const Index m = k_train.rows();
  CheckLabels(labels, m);
  Vector grad(m);
  for (Index t = 0; t < m; ++t) {
    grad(t) = labels[static_cast<std::size_t>(t)] * k_train.entries.row(t).dot(model.dual_coefs) - 1.0;
  }
  const Violation v = FindViolation(model.alpha, grad, labels, model.C);
  if (v.i < 0 || v.j < 0) return 0.0;
  return std::max(0.0, v.up - v.low);
}

Vector LinearWeights(const SvcModel& model, const Matrix& x_train) {
  if (x_train.rows() != model.train_samples()) Fail(ErrorKind::kData, "training rows do not match model");
  return x_train.transpose() * model.dual_coefs;
}

}  // namespace klrfs
