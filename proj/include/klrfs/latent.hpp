#pragma once

#include "klrfs/kernel.hpp"

namespace klrfs {

// Statistics of an uncentered training kernel, needed to center kernels
// between new samples and the training set consistently.
struct CenteringStats {
  Vector col_means;  // mean of each training column of K
  double grand_mean = 0.0;
};

CenteringStats ComputeCenteringStats(const GramMatrix& k_train);

// Centers a (test x train) cross kernel with the training statistics:
// Kc - 1' K - Kc 1 + 1' K 1.
GramMatrix CenterCross(const GramMatrix& k_cross, const CenteringStats& stats);

struct KpcaOptions {
  // 0 selects the smallest count covering `variance_fraction` of the
  // eigenvalue mass, capped at min(m - 1, max_components).
  Index num_components = 0;
  double variance_fraction = 0.95;
  Index max_components = 50;
};

// Eigenpairs of a centered training kernel, m * Lambda * U = K U.
struct KpcaModel {
  Matrix eigvecs;   // m x p, orthonormal columns
  Vector eigvals;   // lambda_j, positive and non-increasing
  double train_gamma = 0.0;  // bandwidth of the training kernel, 0 if unknown
  CenteringStats centering;  // empty when the caller centered the kernel
  bool truncated = false;    // fewer components than requested survived

  Index num_components() const { return eigvecs.cols(); }
  Index train_samples() const { return eigvecs.rows(); }
};

struct LatentCoords {
  Matrix coords;  // samples x components
};

KpcaModel FitKpca(const GramMatrix& k_centered, const KpcaOptions& options = {});

// Centers `k_train` itself, keeps the centering statistics in the model.
KpcaModel FitKpcaOnKernel(const GramMatrix& k_train, const KpcaOptions& options = {});

// Kernel principal components l_j = sum_i u_ij k~(x_i, x) with unit-norm
// eigenvectors. For the training set this equals U * diag(m * lambda).
LatentCoords Project(const KpcaModel& model, const GramMatrix& k_cross_centered);

// Coordinates divided by sqrt(m * lambda_j): the conventional kernel PCA
// scores, which coincide with linear PCA scores for a linear kernel.
Matrix NormalizedScores(const KpcaModel& model, const LatentCoords& z);

struct LatentKernel {
  GramMatrix k_z;
  double gamma_z = 0.0;
};

// RBF kernel on latent coordinates, bandwidth from the median heuristic.
LatentKernel BuildLatentKernel(const LatentCoords& z);

struct MixedTarget {
  double delta = 1.0;
  GramMatrix k_delta;
};

// delta * K_yy + (1 - delta) * K_z, entry-wise.
MixedTarget MixTargets(const GramMatrix& k_yy, const GramMatrix& k_z, double delta);

struct HybridTarget {
  GramMatrix k_yy;
  KpcaModel kpca;
  LatentKernel latent;
  MixedTarget mixed;
};

// Full latent-regularised target from standardized training rows: K_yy from
// labels, kernel PCA on an RBF kernel over all features (median-heuristic
// bandwidth), K_z on the training latent coordinates, then the mixture.
HybridTarget BuildHybridTarget(const Matrix& x_train, std::span<const int> labels, double delta,
                               const KpcaOptions& options = {});

}  // namespace klrfs
