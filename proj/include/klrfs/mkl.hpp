#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "klrfs/kernel.hpp"

namespace klrfs {

struct BankOptions {
  // Feature kernels are kept in memory while they fit in this budget and
  // recomputed on demand beyond it.
  std::size_t cache_bytes = std::size_t{1} << 30;
  int threads = 1;
};

// One RBF kernel per input feature, each with its own bandwidth picked from
// a grid to maximise standalone alignment with the target.
class FeatureKernelBank {
 public:
  FeatureKernelBank(const Matrix& x_train, const GramMatrix& target,
                    std::span<const double> gamma_grid, const BankOptions& options = {});

  Index size() const { return static_cast<Index>(gammas_.size()); }
  Index samples() const { return x_.rows(); }

  double gamma(Index i) const { return gammas_[static_cast<std::size_t>(i)]; }
  double kta(Index i) const { return kta_[static_cast<std::size_t>(i)]; }
  bool constant(Index i) const { return constant_[static_cast<std::size_t>(i)]; }
  double self_inner(Index i) const { return self_inner_[static_cast<std::size_t>(i)]; }
  double target_inner(Index i) const { return target_inner_[static_cast<std::size_t>(i)]; }
  double target_self_inner() const { return target_self_inner_; }
  const std::vector<double>& gammas() const { return gammas_; }
  int threads() const { return threads_; }

  // The i-th feature-wise Gram matrix (cached or rebuilt).
  GramMatrix Kernel(Index i) const;

  // <K_i, K_j>_F for every j, written to `out` (size() entries).
  void InnerWithAll(Index i, std::span<double> out) const;

 private:
  Matrix BuildKernel(Index i) const;

  Matrix x_;
  std::vector<double> gammas_;
  std::vector<double> kta_;
  std::vector<bool> constant_;
  std::vector<double> self_inner_;
  std::vector<double> target_inner_;
  double target_self_inner_ = 0.0;
  std::vector<Matrix> cache_;
  int threads_ = 1;
};

struct TwoKernelWeights {
  double mu_a = 1.0;
  double mu_b = 0.0;
  double kta = 0.0;
  bool proportional = false;  // K_b is a multiple of K_a; (1, 0) returned
};

// Gram entries of the 2x2 problem: <a,a>, <a,b>, <b,b>, <a,T>, <b,T>, <T,T>.
struct PairInnerProducts {
  double aa, ab, bb, at, bt, tt;
};

// Maximises alignment of mu_a K_a + mu_b K_b with the target over mu >= 0,
// normalised to mu_a + mu_b = 1. The stationary point of the cosine is
// M^{-1} t; when it leaves the orthant the better of (1,0), (0,1) wins, and
// (1,0) wins ties.
TwoKernelWeights SolveTwoKernel(const PairInnerProducts& p);
TwoKernelWeights SolveTwoKernel(const GramMatrix& k_a, const GramMatrix& k_b, const GramMatrix& target);

struct MklSolution {
  std::vector<Index> selected;  // feature indices in selection order
  std::vector<double> weights;  // mu, same order, sums to 1
  std::vector<double> gammas;   // bandwidth per selected feature
  std::vector<double> kta_trace;
  double target_delta = 1.0;
  // Whether mu_0 > mu_1 > ... held for this run; reported, never enforced.
  bool weights_decreasing = true;
};

struct GreedyOptions {
  Index p_max = 10;
  double min_gain = 1e-6;
};

// Greedy forward selection: start from the kernel with the best standalone
// alignment, then repeatedly merge the candidate whose optimal two-kernel
// combination with the current K_mu gains the most alignment. Stops at
// p_max features or when the best gain is <= min_gain. Ties go to the lowest
// feature index.
MklSolution GreedySelect(const FeatureKernelBank& bank, const GreedyOptions& options,
                         double target_delta = 1.0);

// sum_i mu_i exp(-gamma_i (a_f - b_f)^2) over the selected features f.
// Rows carry the full feature set; selected indices address its columns.
GramMatrix ComposeKernel(const MklSolution& solution, const Matrix& rows_a, const Matrix& rows_b);
GramMatrix ComposeKernel(const MklSolution& solution, const Matrix& rows);

}  // namespace klrfs
