#include "klrfs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "klrfs/baselines.hpp"
#include "klrfs/error.hpp"
#include "klrfs/metrics.hpp"
#include "klrfs/parallel.hpp"
#include "klrfs/svc.hpp"

namespace klrfs {

namespace {

constexpr double kNoDelta = std::numeric_limits<double>::quiet_NaN();

bool SameDelta(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

KpcaOptions KpcaFrom(const ExperimentConfig& c) {
  KpcaOptions o;
  o.num_components = c.kpca_components;
  o.variance_fraction = c.kpca_variance;
  o.max_components = c.kpca_max_components;
  return o;
}

BankOptions BankFrom(const ExperimentConfig& c, int threads) {
  BankOptions o;
  o.cache_bytes = static_cast<std::size_t>(c.cache_mb) << 20;
  o.threads = threads;
  return o;
}

std::vector<Index> ToIndex(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

Matrix Submatrix(const Matrix& k, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  return k(rows, cols);
}

std::optional<double> TrainRed(const Matrix& x_train, const std::vector<std::size_t>& cols) {
  if (cols.size() < 2) return std::nullopt;
  Matrix sub(x_train.rows(), static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Index>(k)) = x_train.col(static_cast<Index>(cols[k]));
  try {
    return RedScore(sub);
  } catch (const Error&) {
    return std::nullopt;  // a constant selected column leaves RED undefined
  }
}

std::vector<std::string> NamesOf(const DataMatrix& data, const std::vector<Index>& idx) {
  std::vector<std::string> out;
  for (Index i : idx) {
    out.push_back(data.feature_names.empty() ? "f" + std::to_string(i)
                                             : data.feature_names[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::uint64_t CvSeed(const SplitSpec& split) { return DeriveSeed(split.seed, 2); }

RunRecord FailedRecord(const std::string& method, int p, double delta, const SplitSpec& split,
                       const std::string& what) {
  RunRecord r;
  r.method = method;
  r.p = p;
  r.delta = delta;
  r.repeat = split.repeat;
  r.split_seed = split.seed;
  r.ok = false;
  r.error = what;
  return r;
}

}  // namespace

PreparedSplit PrepareSplit(const DataMatrix& data, const SplitSpec& split) {
  PreparedSplit out;
  out.train = data.SelectRows(split.train);
  out.test = data.SelectRows(split.test);
  out.scaler = FitScaler(out.train.values);
  out.train.values = ApplyScaler(out.scaler, out.train.values);
  out.test.values = ApplyScaler(out.scaler, out.test.values);
  return out;
}

KlrfsSelection SelectFeatures(const Matrix& x_train, std::span<const int> labels, double delta, int p_max,
                              const ExperimentConfig& config, int threads) {
  KlrfsSelection sel;
  sel.target = BuildHybridTarget(x_train, labels, delta, KpcaFrom(config));
  const FeatureKernelBank bank(x_train, sel.target.mixed.k_delta, config.gamma_grid, BankFrom(config, threads));
  sel.solution = GreedySelect(bank, GreedyOptions{p_max, config.min_gain}, delta);
  return sel;
}

CvResult CrossValidate(std::span<const GramMatrix* const> kernels, std::span<const double> c_grid,
                       std::span<const int> labels, int folds, std::uint64_t seed, double tol) {
  if (kernels.empty() || c_grid.empty()) Fail(ErrorKind::kParameter, "cross-validation has no candidates");
  const std::vector<int> fold = StratifiedFolds(labels, folds, seed);
  CvResult result;
  result.mean_auc.assign(kernels.size() * c_grid.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    std::vector<Index> tr, va;
    std::vector<int> y_tr, y_va;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (fold[i] == f) {
        va.push_back(static_cast<Index>(i));
        y_va.push_back(labels[i]);
      } else {
        tr.push_back(static_cast<Index>(i));
        y_tr.push_back(labels[i]);
      }
    }
    for (std::size_t k = 0; k < kernels.size(); ++k) {
      const GramMatrix k_tr = GramMatrix::Square(Submatrix(kernels[k]->entries, tr, tr));
      const GramMatrix k_va = GramMatrix::Cross(Submatrix(kernels[k]->entries, va, tr));
      for (std::size_t c = 0; c < c_grid.size(); ++c) {
        const SvcModel model = FitSvc(k_tr, y_tr, SvcOptions{c_grid[c], tol});
        result.mean_auc[k * c_grid.size() + c] += AucRoc(DecisionValues(model, k_va), y_va) / folds;
      }
    }
  }
  for (std::size_t i = 1; i < result.mean_auc.size(); ++i) {
    if (result.mean_auc[i] > result.mean_auc[result.best]) result.best = i;
  }
  return result;
}

SplitSpec RepeatSplit(const ExperimentConfig& config, const DataMatrix& data, int repeat) {
  return StratifiedSplit(data.labels, config.train_fraction,
                         DeriveSeed(config.seed, 1, static_cast<std::uint64_t>(repeat)), repeat);
}

std::vector<RunRecord> RunKlrfs(const ExperimentConfig& config, const DataMatrix& data, const SplitSpec& split,
                                double delta, std::span<const int> p_grid) {
  const PreparedSplit ps = PrepareSplit(data, split);
  const Matrix& xtr = ps.train.values;
  const Matrix& xte = ps.test.values;

  const HybridTarget target = BuildHybridTarget(xtr, ps.train.labels, delta, KpcaFrom(config));
  const FeatureKernelBank bank(xtr, target.mixed.k_delta, config.gamma_grid, BankFrom(config, 1));

  std::vector<RunRecord> out;
  for (int p : p_grid) {
    try {
      RunRecord r;
      r.method = "klrfs";
      r.p = p;
      r.delta = delta;
      r.repeat = split.repeat;
      r.split_seed = split.seed;
      r.kpca_components = target.kpca.num_components();
      r.gamma_z = target.latent.gamma_z;

      const MklSolution sol = GreedySelect(bank, GreedyOptions{p, config.min_gain}, delta);
      r.selected = sol.selected;
      r.selected_names = NamesOf(data, sol.selected);
      r.weights = sol.weights;
      r.feature_gammas = sol.gammas;
      r.kta_trace = sol.kta_trace;
      r.weights_decreasing = sol.weights_decreasing;

      const GramMatrix k_train = ComposeKernel(sol, xtr);
      const GramMatrix k_test = ComposeKernel(sol, xte, xtr);
      const GramMatrix* kernels[] = {&k_train};
      const CvResult cv = CrossValidate(kernels, config.c_grid, ps.train.labels, config.cv_folds, CvSeed(split),
                                        config.svc_tol);
      r.C = config.c_grid[cv.best];
      r.cv_auc = cv.mean_auc[cv.best];
      const SvcModel model = FitSvc(k_train, ps.train.labels, SvcOptions{r.C, config.svc_tol});
      r.test_auc = AucRoc(DecisionValues(model, k_test), ps.test.labels);

      std::vector<std::size_t> cols(sol.selected.begin(), sol.selected.end());
      r.train_red = TrainRed(xtr, cols);
      r.ok = true;
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.push_back(FailedRecord("klrfs", p, delta, split, e.what()));
    }
  }
  return out;
}

std::vector<RunRecord> RunBaseline(const ExperimentConfig& config, const DataMatrix& data, const SplitSpec& split,
                                   const std::string& method, std::span<const int> p_grid) {
  const PreparedSplit ps = PrepareSplit(data, split);
  const Matrix& xtr = ps.train.values;

  std::optional<FeatureRanking> shared;
  if (method == "anova") {
    shared = AnovaRank(ps.train);
  } else if (method == "external") {
    shared = LoadExternalRanking(config.external_ranking, data.feature_names);
  } else if (method != "svm-rfe") {
    Fail(ErrorKind::kConfig, "unknown method '" + method + "'");
  }

  std::vector<RunRecord> out;
  for (int p : p_grid) {
    try {
      if (p > data.features()) Fail(ErrorKind::kParameter, "p exceeds the number of features");
      RunRecord r;
      r.method = method;
      r.p = p;
      r.delta = kNoDelta;
      r.repeat = split.repeat;
      r.split_seed = split.seed;

      std::vector<std::size_t> cols;
      if (shared) {
        if (static_cast<std::size_t>(p) > shared->order.size()) {
          Fail(ErrorKind::kData, "external ranking lists fewer than " + std::to_string(p) + " features");
        }
        cols = shared->Top(static_cast<std::size_t>(p));
      } else {
        const FeatureRanking rfe = SvmRfe(ps.train, RfeOptions{p, config.rfe_c, config.rfe_drop_fraction, config.svc_tol});
        cols = rfe.Top(static_cast<std::size_t>(p));
      }
      r.selected = ToIndex(cols);
      r.selected_names = NamesOf(data, r.selected);

      const DataMatrix tr = ps.train.SelectColumns(cols);
      const DataMatrix te = ps.test.SelectColumns(cols);
      std::vector<GramMatrix> grams;
      grams.reserve(config.gamma_grid.size());
      for (double g : config.gamma_grid) grams.push_back(RbfGram(tr.values, g));
      std::vector<const GramMatrix*> ptrs;
      for (const auto& g : grams) ptrs.push_back(&g);
      const CvResult cv = CrossValidate(ptrs, config.c_grid, ps.train.labels, config.cv_folds, CvSeed(split),
                                        config.svc_tol);
      const std::size_t gi = cv.best / config.c_grid.size();
      const std::size_t ci = cv.best % config.c_grid.size();
      r.svm_gamma = config.gamma_grid[gi];
      r.C = config.c_grid[ci];
      r.cv_auc = cv.mean_auc[cv.best];
      const SvcModel model = FitSvc(grams[gi], ps.train.labels, SvcOptions{r.C, config.svc_tol});
      r.test_auc = AucRoc(DecisionValues(model, RbfCross(te.values, tr.values, r.svm_gamma)), ps.test.labels);
      r.train_red = TrainRed(xtr, cols);
      r.ok = true;
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      out.push_back(FailedRecord(method, p, kNoDelta, split, e.what()));
    }
  }
  return out;
}

namespace {

struct Job {
  std::string method;
  double delta;
  int repeat;
};

ExperimentReport RunJobs(const std::string& kind, const ExperimentConfig& config, const DataMatrix& data,
                         const std::vector<Job>& jobs) {
  ValidateConfig(config);
  data.Validate();
  std::vector<std::vector<RunRecord>> results(jobs.size());
  ParallelFor(jobs.size(), config.jobs, [&](std::size_t j) {
    const Job& job = jobs[j];
    SplitSpec split;
    try {
      split = RepeatSplit(config, data, job.repeat);
      results[j] = job.method == "klrfs" ? RunKlrfs(config, data, split, job.delta, config.p_select)
                                         : RunBaseline(config, data, split, job.method, config.p_select);
    } catch (const std::exception& e) {
      split.repeat = job.repeat;
      for (int p : config.p_select) results[j].push_back(FailedRecord(job.method, p, job.delta, split, e.what()));
    }
  });

  ExperimentReport report;
  report.kind = kind;
  report.config = config;
  report.samples = data.samples();
  report.features = data.features();
  for (auto& r : results) {
    for (auto& rec : r) report.records.push_back(std::move(rec));
  }
  report.aggregates = Aggregate(report.records);
  return report;
}

}  // namespace

ExperimentReport RunEvaluate(const ExperimentConfig& config, const DataMatrix& data) {
  std::vector<Job> jobs;
  for (int r = 0; r < config.n_repeats; ++r) jobs.push_back({"klrfs", config.delta, r});
  return RunJobs("evaluate", config, data, jobs);
}

ExperimentReport RunDeltaSweep(const ExperimentConfig& config, const DataMatrix& data) {
  std::vector<Job> jobs;
  for (int r = 0; r < config.n_repeats; ++r) {
    for (double d : config.delta_grid) jobs.push_back({"klrfs", d, r});
  }
  return RunJobs("sweep-delta", config, data, jobs);
}

ExperimentReport RunBenchmark(const ExperimentConfig& config, const DataMatrix& data) {
  std::vector<Job> jobs;
  for (int r = 0; r < config.n_repeats; ++r) {
    for (const auto& m : config.methods) jobs.push_back({m, m == "klrfs" ? config.delta : kNoDelta, r});
  }
  return RunJobs("benchmark", config, data, jobs);
}

std::vector<AggregateRow> Aggregate(const std::vector<RunRecord>& records) {
  std::vector<AggregateRow> rows;
  std::vector<std::vector<double>> aucs, reds;
  for (const auto& rec : records) {
    std::size_t k = 0;
    while (k < rows.size() &&
           !(rows[k].method == rec.method && rows[k].p == rec.p && SameDelta(rows[k].delta, rec.delta))) {
      ++k;
    }
    if (k == rows.size()) {
      AggregateRow row;
      row.method = rec.method;
      row.p = rec.p;
      row.delta = rec.delta;
      rows.push_back(row);
      aucs.emplace_back();
      reds.emplace_back();
    }
    if (!rec.ok) {
      ++rows[k].failures;
      continue;
    }
    ++rows[k].runs;
    aucs[k].push_back(rec.test_auc);
    if (rec.train_red) reds[k].push_back(*rec.train_red);
  }
  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = sd = 0.0;
    if (v.empty()) {
      mean = sd = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double x : v) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(v.size()));
  };
  for (std::size_t k = 0; k < rows.size(); ++k) {
    stats(aucs[k], rows[k].auc_mean, rows[k].auc_std);
    stats(reds[k], rows[k].red_mean, rows[k].red_std);
    rows[k].red_runs = static_cast<int>(reds[k].size());
  }
  return rows;
}

SelectOutput SelectOnDataset(const ExperimentConfig& config, const DataMatrix& data) {
  ValidateConfig(config);
  data.Validate();
  const Scaler scaler = FitScaler(data.values);
  const Matrix x = ApplyScaler(scaler, data.values);
  const int p_max = *std::max_element(config.p_select.begin(), config.p_select.end());
  KlrfsSelection sel = SelectFeatures(x, data.labels, config.delta, p_max, config, config.jobs);
  SelectOutput out;
  out.solution = std::move(sel.solution);
  out.feature_names = NamesOf(data, out.solution.selected);
  out.kpca_components = sel.target.kpca.num_components();
  out.gamma_z = sel.target.latent.gamma_z;
  return out;
}

}  // namespace klrfs
