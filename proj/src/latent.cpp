#include "klrfs/latent.hpp"

#include <cmath>

#include "klrfs/error.hpp"

namespace klrfs {

CenteringStats ComputeCenteringStats(const GramMatrix& k_train) {
  if (k_train.rows() != k_train.cols()) Fail(ErrorKind::kData, "centering stats need a square kernel");
  CenteringStats s;
  s.col_means = k_train.entries.colwise().mean().transpose();
  s.grand_mean = k_train.entries.mean();
  return s;
}

GramMatrix CenterCross(const GramMatrix& k_cross, const CenteringStats& stats) {
  if (k_cross.cols() != stats.col_means.size()) {
    Fail(ErrorKind::kData, "cross kernel has " + std::to_string(k_cross.cols()) +
                               " columns, training set has " + std::to_string(stats.col_means.size()));
  }
  const Vector row_means = k_cross.entries.rowwise().mean();
  GramMatrix out = k_cross;
  out.entries.rowwise() -= stats.col_means.transpose();
  out.entries.colwise() -= row_means;
  out.entries.array() += stats.grand_mean;
  return out;
}

KpcaModel FitKpca(const GramMatrix& k_centered, const KpcaOptions& options) {
  const Index m = k_centered.rows();
  if (m != k_centered.cols()) Fail(ErrorKind::kData, "kernel PCA needs a square kernel");
  if (m < 2) Fail(ErrorKind::kData, "kernel PCA needs at least 2 samples");
  if (options.num_components < 0 || options.num_components > m) {
    Fail(ErrorKind::kParameter, "num_components must lie in [0, m]");
  }
  if (!(options.variance_fraction > 0.0 && options.variance_fraction <= 1.0)) {
    Fail(ErrorKind::kParameter, "variance_fraction must lie in (0, 1]");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(k_centered.entries);
  if (solver.info() != Eigen::Success) Fail(ErrorKind::kNumerical, "kernel eigensolve failed");
  // Ascending order from Eigen; walk from the top.
  const Vector& ev = solver.eigenvalues();
  const double top = ev(m - 1);
  if (!(top > 0.0)) Fail(ErrorKind::kDegenerate, "centered kernel has no positive eigenvalue");

  Index rank = 0;
  double mass = 0.0;
  for (Index k = m - 1; k >= 0 && ev(k) > 1e-10 * top; --k) {
    ++rank;
    mass += ev(k);
  }

  Index wanted = options.num_components;
  if (wanted == 0) {
    const Index cap = std::min<Index>(m - 1, std::max<Index>(options.max_components, 1));
    double acc = 0.0;
    wanted = 0;
    for (Index k = m - 1; k >= 0 && wanted < rank; --k) {
      acc += ev(k);
      ++wanted;
      if (acc >= options.variance_fraction * mass) break;
    }
    wanted = std::max<Index>(1, std::min(wanted, cap));
  }

  KpcaModel model;
  const Index p = std::min(wanted, rank);
  model.truncated = p < wanted;
  model.eigvecs.resize(m, p);
  model.eigvals.resize(p);
  for (Index j = 0; j < p; ++j) {
    Vector u = solver.eigenvectors().col(m - 1 - j);
    // Sign convention: the largest-magnitude entry is positive.
    Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) u = -u;
    model.eigvecs.col(j) = u;
    model.eigvals(j) = ev(m - 1 - j) / static_cast<double>(m);
  }
  return model;
}

KpcaModel FitKpcaOnKernel(const GramMatrix& k_train, const KpcaOptions& options) {
  KpcaModel model = FitKpca(CenterKernel(k_train), options);
  model.centering = ComputeCenteringStats(k_train);
  return model;
}

LatentCoords Project(const KpcaModel& model, const GramMatrix& k_cross_centered) {
  if (k_cross_centered.cols() != model.train_samples()) {
    Fail(ErrorKind::kData, "projection kernel has " + std::to_string(k_cross_centered.cols()) +
                               " columns, model was fit on " + std::to_string(model.train_samples()));
  }
  return LatentCoords{k_cross_centered.entries * model.eigvecs};
}

Matrix NormalizedScores(const KpcaModel& model, const LatentCoords& z) {
  if (z.coords.cols() != model.num_components()) Fail(ErrorKind::kData, "component count mismatch");
  const double m = static_cast<double>(model.train_samples());
  Vector scale = (m * model.eigvals).cwiseSqrt().cwiseInverse();
  return z.coords * scale.asDiagonal();
}

LatentKernel BuildLatentKernel(const LatentCoords& z) {
  if (z.coords.rows() < 2) Fail(ErrorKind::kData, "latent kernel needs at least 2 samples");
  LatentKernel out;
  try {
    out.gamma_z = MedianHeuristicGamma(z.coords);
  } catch (const Error& e) {
    Fail(ErrorKind::kDegenerate, std::string("degenerate latent space: ") + e.what());
  }
  out.k_z = RbfGram(z.coords, out.gamma_z);
  return out;
}

MixedTarget MixTargets(const GramMatrix& k_yy, const GramMatrix& k_z, double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    Fail(ErrorKind::kParameter, "mixture coefficient delta must lie in [0, 1], got " + std::to_string(delta));
  }
  if (k_yy.rows() != k_z.rows() || k_yy.cols() != k_z.cols()) {
    Fail(ErrorKind::kData, "target kernels differ in shape");
  }
  MixedTarget out;
  out.delta = delta;
  out.k_delta = k_yy;
  out.k_delta.entries = delta * k_yy.entries.array() + (1.0 - delta) * k_z.entries.array();
  return out;
}

HybridTarget BuildHybridTarget(const Matrix& x_train, std::span<const int> labels, double delta,
                               const KpcaOptions& options) {
  HybridTarget h;
  h.k_yy = TargetFromLabels(labels);
  const double gamma = MedianHeuristicGamma(x_train);
  const GramMatrix k_train = RbfGram(x_train, gamma);
  h.kpca = FitKpcaOnKernel(k_train, options);
  h.kpca.train_gamma = gamma;
  const LatentCoords z = Project(h.kpca, CenterKernel(k_train));
  h.latent = BuildLatentKernel(z);
  h.mixed = MixTargets(h.k_yy, h.latent.k_z, delta);
  return h;
}

}  // namespace klrfs
