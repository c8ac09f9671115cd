#pragma once

#include <span>
#include <string>
#include <vector>

#include "klrfs/kernel.hpp"
#include "klrfs/svc.hpp"

namespace klrfs {

struct FeatureRanking {
  std::vector<double> scores;  // one per feature, larger is better
  std::vector<Index> order;    // best first; ties by lowest index
  std::string method;

  std::vector<std::size_t> Top(std::size_t p) const;
};

// Orders features by descending score, ties by lowest index. NaN scores rank
// last.
std::vector<Index> OrderByScore(std::span<const double> scores);

// Two-group one-way ANOVA F statistic per feature (equal to t^2 for two
// classes). Zero spread everywhere gives F = 0; zero within-class spread
// with a class gap gives +inf.
FeatureRanking AnovaRank(const DataMatrix& x);

struct RfeOptions {
  Index p_select = 10;
  double C = 1.0;
  double drop_fraction = 0.1;
  double tol = 1e-3;
};

// SVM recursive feature elimination on a linear kernel. Each round drops the
// ceil(drop_fraction * remaining) features with smallest |w_j|, never going
// below p_select. The order lists survivors by final |w| and then eliminated
// features, latest elimination first.
FeatureRanking SvmRfe(const DataMatrix& x, const RfeOptions& options);

// Number of refits SvmRfe performs for a given size schedule; exposed for
// tests.
std::size_t RfeRounds(Index n, Index p_select, double drop_fraction);

// External ranking file: one feature name per line, best first. Names are
// resolved against `feature_names`; unknown names are a data error.
FeatureRanking LoadExternalRanking(const std::string& path, std::span<const std::string> feature_names);

}  // namespace klrfs
