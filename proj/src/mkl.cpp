#include "klrfs/mkl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "klrfs/error.hpp"
#include "klrfs/parallel.hpp"

namespace klrfs {

namespace {

Matrix FeatureRbf(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, double gamma) {
  Matrix k(a.size(), b.size());
  for (Index j = 0; j < b.size(); ++j) {
    for (Index i = 0; i < a.size(); ++i) {
      const double d = a(i) - b(j);
      k(i, j) = std::exp(-gamma * d * d);
    }
  }
  return k;
}

Matrix FeatureRbfSquare(const Eigen::Ref<const Vector>& x, double gamma) {
  const Index m = x.size();
  Matrix k(m, m);
  for (Index j = 0; j < m; ++j) {
    k(j, j) = 1.0;
    for (Index i = j + 1; i < m; ++i) {
      const double d = x(i) - x(j);
      const double v = std::exp(-gamma * d * d);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

double Cosine(double cross, double self, double target_self) {
  return cross / std::sqrt(self * target_self);
}

}  // namespace

FeatureKernelBank::FeatureKernelBank(const Matrix& x_train, const GramMatrix& target,
                                     std::span<const double> gamma_grid, const BankOptions& options)
    : x_(x_train), threads_(std::max(options.threads, 1)) {
  if (gamma_grid.empty()) Fail(ErrorKind::kParameter, "gamma grid is empty");
  for (double g : gamma_grid) {
    if (!(g > 0.0) || !std::isfinite(g)) Fail(ErrorKind::kParameter, "gamma grid values must be positive");
  }
  if (x_.cols() < 1) Fail(ErrorKind::kParameter, "feature kernel bank needs at least one feature");
  if (target.rows() != x_.rows() || target.cols() != x_.rows()) {
    Fail(ErrorKind::kData, "target kernel does not match the training sample count");
  }
  if (!x_.allFinite()) Fail(ErrorKind::kData, "training data contains non-finite values");

  std::vector<double> grid(gamma_grid.begin(), gamma_grid.end());
  std::sort(grid.begin(), grid.end());

  const auto n = static_cast<std::size_t>(x_.cols());
  gammas_.assign(n, grid.front());
  kta_.assign(n, 0.0);
  constant_.assign(n, false);
  self_inner_.assign(n, 0.0);
  target_inner_.assign(n, 0.0);
  target_self_inner_ = target.entries.squaredNorm();
  if (!(target_self_inner_ > 0.0)) Fail(ErrorKind::kDegenerate, "target kernel has zero norm");

  const auto m = static_cast<std::size_t>(x_.rows());
  const bool cache = n * m * m * sizeof(double) <= options.cache_bytes;
  if (cache) cache_.resize(n);

  std::vector<char> constant(n, 0);
  ParallelFor(n, threads_, [&](std::size_t f) {
    const auto col = x_.col(static_cast<Index>(f));
    constant[f] = (col.array() == col(0)).all() ? 1 : 0;
    double best = -std::numeric_limits<double>::infinity();
    for (double g : grid) {
      Matrix k = FeatureRbfSquare(col, g);
      const double kk = k.squaredNorm();
      const double kt = k.cwiseProduct(target.entries).sum();
      const double a = Cosine(kt, kk, target_self_inner_);
      // Strict comparison: ties keep the smaller gamma.
      if (a > best) {
        best = a;
        gammas_[f] = g;
        kta_[f] = a;
        self_inner_[f] = kk;
        target_inner_[f] = kt;
        if (cache) cache_[f] = std::move(k);
      }
    }
  });
  for (std::size_t f = 0; f < n; ++f) constant_[f] = constant[f] != 0;
}

Matrix FeatureKernelBank::BuildKernel(Index i) const {
  if (!cache_.empty()) return cache_[static_cast<std::size_t>(i)];
  return FeatureRbfSquare(x_.col(i), gammas_[static_cast<std::size_t>(i)]);
}

GramMatrix FeatureKernelBank::Kernel(Index i) const {
  if (i < 0 || i >= size()) Fail(ErrorKind::kParameter, "feature index out of range");
  return GramMatrix::Square(BuildKernel(i));
}

void FeatureKernelBank::InnerWithAll(Index i, std::span<double> out) const {
  if (static_cast<Index>(out.size()) != size()) Fail(ErrorKind::kParameter, "output span has wrong size");
  if (!cache_.empty()) {
    const Matrix& ki = cache_[static_cast<std::size_t>(i)];
    ParallelFor(out.size(), threads_, [&](std::size_t j) { out[j] = ki.cwiseProduct(cache_[j]).sum(); });
    return;
  }
  const Matrix ki = BuildKernel(i);
  ParallelFor(out.size(), threads_, [&](std::size_t j) {
    out[j] = ki.cwiseProduct(BuildKernel(static_cast<Index>(j))).sum();
  });
}

TwoKernelWeights SolveTwoKernel(const PairInnerProducts& p) {
  if (!(p.aa > 0.0)) Fail(ErrorKind::kDegenerate, "first kernel has zero norm");
  if (!(p.tt > 0.0)) Fail(ErrorKind::kDegenerate, "target kernel has zero norm");

  TwoKernelWeights at_a{1.0, 0.0, Cosine(p.at, p.aa, p.tt), false};
  const double det = p.aa * p.bb - p.ab * p.ab;
  if (!(p.bb > 0.0) || det <= 1e-12 * p.aa * p.bb) {
    at_a.proportional = p.bb > 0.0;
    return at_a;
  }

  TwoKernelWeights best = at_a;
  const TwoKernelWeights at_b{0.0, 1.0, Cosine(p.bt, p.bb, p.tt), false};
  if (at_b.kta > best.kta) best = at_b;

  // Stationary point of the cosine: mu proportional to M^{-1} t.
  double mu_a = (p.bb * p.at - p.ab * p.bt) / det;
  double mu_b = (p.aa * p.bt - p.ab * p.at) / det;
  if (mu_a > 0.0 && mu_b > 0.0) {
    const double s = mu_a + mu_b;
    mu_a /= s;
    mu_b /= s;
    const double cross = mu_a * p.at + mu_b * p.bt;
    const double self = mu_a * mu_a * p.aa + 2.0 * mu_a * mu_b * p.ab + mu_b * mu_b * p.bb;
    const double kta = Cosine(cross, self, p.tt);
    if (kta > best.kta) best = TwoKernelWeights{mu_a, mu_b, kta, false};
  }
  return best;
}

TwoKernelWeights SolveTwoKernel(const GramMatrix& k_a, const GramMatrix& k_b, const GramMatrix& target) {
  PairInnerProducts p{FrobeniusInner(k_a, k_a),      FrobeniusInner(k_a, k_b),
                      FrobeniusInner(k_b, k_b),      FrobeniusInner(k_a, target),
                      FrobeniusInner(k_b, target),   FrobeniusInner(target, target)};
  return SolveTwoKernel(p);
}

MklSolution GreedySelect(const FeatureKernelBank& bank, const GreedyOptions& options, double target_delta) {
  if (bank.size() == 0) Fail(ErrorKind::kParameter, "feature kernel bank is empty");
  if (options.p_max < 1) Fail(ErrorKind::kParameter, "p_max must be at least 1");
  if (!(options.min_gain >= 0.0)) Fail(ErrorKind::kParameter, "min_gain must be non-negative");

  const Index n = bank.size();
  const auto nz = static_cast<std::size_t>(n);
  const double tt = bank.target_self_inner();

  Index first = 0;
  for (Index j = 1; j < n; ++j) {
    if (bank.kta(j) > bank.kta(first)) first = j;
  }

  MklSolution sol;
  sol.target_delta = target_delta;
  sol.selected.push_back(first);
  sol.weights.push_back(1.0);
  sol.gammas.push_back(bank.gamma(first));

  // Running Frobenius products of the current combination K_mu.
  double mu_t = bank.target_inner(first);
  double mu_mu = bank.self_inner(first);
  std::vector<double> mu_with(nz);
  bank.InnerWithAll(first, mu_with);
  sol.kta_trace.push_back(Cosine(mu_t, mu_mu, tt));

  std::vector<char> taken(nz, 0);
  taken[static_cast<std::size_t>(first)] = 1;
  std::vector<TwoKernelWeights> trial(nz);
  std::vector<double> new_with(nz);

  while (static_cast<Index>(sol.selected.size()) < std::min(options.p_max, n)) {
    ParallelFor(nz, bank.threads(), [&](std::size_t j) {
      if (taken[j]) return;
      const auto jj = static_cast<Index>(j);
      trial[j] = SolveTwoKernel(PairInnerProducts{mu_mu, mu_with[j], bank.self_inner(jj), mu_t,
                                                  bank.target_inner(jj), tt});
    });
    // Sequential argmax so ties resolve to the lowest index.
    Index best = -1;
    for (std::size_t j = 0; j < nz; ++j) {
      if (taken[j]) continue;
      if (best < 0 || trial[j].kta > trial[static_cast<std::size_t>(best)].kta) best = static_cast<Index>(j);
    }
    if (best < 0) break;
    const TwoKernelWeights& w = trial[static_cast<std::size_t>(best)];
    const double gain = w.kta - sol.kta_trace.back();
    if (!(gain > options.min_gain) || w.mu_b <= 0.0 || w.mu_a <= 0.0) break;

    for (double& mu : sol.weights) mu *= w.mu_a;
    sol.selected.push_back(best);
    sol.weights.push_back(w.mu_b);
    sol.gammas.push_back(bank.gamma(best));
    taken[static_cast<std::size_t>(best)] = 1;

    bank.InnerWithAll(best, new_with);
    const double bb = bank.self_inner(best);
    mu_mu = w.mu_a * w.mu_a * mu_mu + 2.0 * w.mu_a * w.mu_b * mu_with[static_cast<std::size_t>(best)] +
            w.mu_b * w.mu_b * bb;
    mu_t = w.mu_a * mu_t + w.mu_b * bank.target_inner(best);
    for (std::size_t j = 0; j < nz; ++j) mu_with[j] = w.mu_a * mu_with[j] + w.mu_b * new_with[j];
    sol.kta_trace.push_back(w.kta);
  }

  double total = 0.0;
  for (double mu : sol.weights) total += mu;
  for (double& mu : sol.weights) mu /= total;
  for (std::size_t t = 1; t < sol.weights.size(); ++t) {
    if (!(sol.weights[t] < sol.weights[t - 1])) sol.weights_decreasing = false;
  }
  return sol;
}

GramMatrix ComposeKernel(const MklSolution& solution, const Matrix& rows_a, const Matrix& rows_b) {
  if (solution.selected.size() != solution.weights.size() || solution.selected.size() != solution.gammas.size()) {
    Fail(ErrorKind::kData, "inconsistent MKL solution");
  }
  if (solution.selected.empty()) Fail(ErrorKind::kData, "MKL solution selects no features");
  Matrix k = Matrix::Zero(rows_a.rows(), rows_b.rows());
  for (std::size_t s = 0; s < solution.selected.size(); ++s) {
    const Index f = solution.selected[s];
    if (f < 0 || f >= rows_a.cols() || f >= rows_b.cols()) {
      Fail(ErrorKind::kData, "selected feature " + std::to_string(f) + " missing from the input rows");
    }
    k.noalias() += solution.weights[s] * FeatureRbf(rows_a.col(f), rows_b.col(f), solution.gammas[s]);
  }
  return GramMatrix::Cross(std::move(k));
}

GramMatrix ComposeKernel(const MklSolution& solution, const Matrix& rows) {
  GramMatrix g = ComposeKernel(solution, rows, rows);
  g.kind = GramKind::kSquare;
  return g;
}

}  // namespace klrfs
