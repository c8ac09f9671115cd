#pragma once

#include <optional>
#include <string>
#include <vector>

#include "klrfs/config.hpp"
#include "klrfs/dataset.hpp"
#include "klrfs/latent.hpp"
#include "klrfs/mkl.hpp"

namespace klrfs {

// Outcome of one (method, p, delta, repeat) cell.
struct RunRecord {
  std::string method;
  int p = 0;
  double delta = 0.0;  // NaN for methods that do not use a target mixture
  int repeat = 0;
  std::uint64_t split_seed = 0;
  bool ok = false;
  std::string error;

  std::vector<Index> selected;
  std::vector<std::string> selected_names;
  std::vector<double> weights;       // mu for klrfs, empty otherwise
  std::vector<double> feature_gammas;
  std::vector<double> kta_trace;
  bool weights_decreasing = false;
  Index kpca_components = 0;
  double gamma_z = 0.0;

  double C = 0.0;
  double svm_gamma = 0.0;  // baselines only
  double cv_auc = 0.0;
  double test_auc = 0.0;
  std::optional<double> train_red;  // undefined with fewer than 2 features
};

struct AggregateRow {
  std::string method;
  int p = 0;
  double delta = 0.0;
  int runs = 0;
  int failures = 0;
  double auc_mean = 0.0, auc_std = 0.0;
  double red_mean = 0.0, red_std = 0.0;
  int red_runs = 0;
};

struct ExperimentReport {
  std::string kind;  // "evaluate", "sweep-delta" or "benchmark"
  ExperimentConfig config;
  Index samples = 0;
  Index features = 0;
  std::vector<RunRecord> records;
  std::vector<AggregateRow> aggregates;
};

// Train/test matrices of one split after scaling with train statistics.
struct PreparedSplit {
  DataMatrix train;
  DataMatrix test;
  Scaler scaler;
};

PreparedSplit PrepareSplit(const DataMatrix& data, const SplitSpec& split);

// Selection on already-standardized training rows: hybrid target, feature
// kernel bank, greedy MKL.
struct KlrfsSelection {
  HybridTarget target;
  MklSolution solution;
};

KlrfsSelection SelectFeatures(const Matrix& x_train, std::span<const int> labels, double delta, int p_max,
                              const ExperimentConfig& config, int threads = 1);

struct CvResult {
  std::size_t best = 0;   // index into the candidate list
  std::vector<double> mean_auc;
};

// Picks the candidate training kernel / C pair with the best mean
// validation AUC over stratified folds; ties keep the earliest candidate.
CvResult CrossValidate(std::span<const GramMatrix* const> kernels, std::span<const double> c_grid,
                       std::span<const int> labels, int folds, std::uint64_t seed, double tol);

// One KLR-FS run per p on a given split (one target, one kernel bank).
std::vector<RunRecord> RunKlrfs(const ExperimentConfig& config, const DataMatrix& data, const SplitSpec& split,
                                double delta, std::span<const int> p_grid);

// One baseline run per p on a given split.
std::vector<RunRecord> RunBaseline(const ExperimentConfig& config, const DataMatrix& data, const SplitSpec& split,
                                   const std::string& method, std::span<const int> p_grid);

// Split for repeat r, derived from the master seed.
SplitSpec RepeatSplit(const ExperimentConfig& config, const DataMatrix& data, int repeat);

ExperimentReport RunEvaluate(const ExperimentConfig& config, const DataMatrix& data);
ExperimentReport RunDeltaSweep(const ExperimentConfig& config, const DataMatrix& data);
ExperimentReport RunBenchmark(const ExperimentConfig& config, const DataMatrix& data);

// Recomputes aggregate rows (mean, population std) from the records.
std::vector<AggregateRow> Aggregate(const std::vector<RunRecord>& records);

// KLR-FS selection on the whole dataset (standardized), for `select`.
struct SelectOutput {
  MklSolution solution;
  std::vector<std::string> feature_names;
  Index kpca_components = 0;
  double gamma_z = 0.0;
};
SelectOutput SelectOnDataset(const ExperimentConfig& config, const DataMatrix& data);

}  // namespace klrfs
