#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "klrfs/dataset.hpp"
#include "klrfs/error.hpp"
#include "klrfs/pipeline.hpp"
#include "klrfs/report.hpp"

using namespace klrfs;

namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.n_repeats = 2;
  c.cv_folds = 3;
  c.p_select = {2, 4};
  c.delta_grid = {0.0, 1.0};
  c.c_grid = {0.1, 1.0};
  c.gamma_grid = {0.1, 1.0};
  c.methods = {"klrfs", "anova", "svm-rfe"};
  return c;
}

DataMatrix SmallData(std::uint64_t seed = 5) { return GenerateSynthetic(40, 15, 3, 2.0, seed).data; }

}  // namespace

TEST_CASE("prepare_split standardizes with training rows only") {
  const DataMatrix d = SmallData();
  const SplitSpec s = StratifiedSplit(d.labels, 0.8, 1);
  const PreparedSplit ps = PrepareSplit(d, s);
  CHECK(ps.train.samples() == 32);
  CHECK(ps.test.samples() == 8);
  CHECK(ps.train.values.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  const Vector var = ps.train.values.array().square().colwise().mean();
  CHECK((var.array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("poisoned test rows leave the selection unchanged") {
  const ExperimentConfig c = SmallConfig();
  DataMatrix d = SmallData();
  const SplitSpec s = RepeatSplit(c, d, 0);
  const std::vector<int> p = {4};
  const std::vector<RunRecord> clean = RunKlrfs(c, d, s, 0.6, p);
  for (std::size_t i : s.test) d.values.row(static_cast<Index>(i)).setConstant(1e6);
  const std::vector<RunRecord> dirty = RunKlrfs(c, d, s, 0.6, p);
  REQUIRE(clean[0].ok);
  REQUIRE(dirty[0].ok);
  CHECK(clean[0].selected == dirty[0].selected);
  CHECK(clean[0].weights == dirty[0].weights);
  CHECK(clean[0].C == dirty[0].C);
  CHECK(clean[0].cv_auc == dirty[0].cv_auc);
  CHECK(clean[0].train_red == dirty[0].train_red);

  const std::vector<RunRecord> base_clean = RunBaseline(c, SmallData(), s, "anova", p);
  const std::vector<RunRecord> base_dirty = RunBaseline(c, d, s, "anova", p);
  CHECK(base_clean[0].selected == base_dirty[0].selected);
  CHECK(base_clean[0].svm_gamma == base_dirty[0].svm_gamma);
}

TEST_CASE("delta = 1 selects exactly as a bank built on the label kernel") {
  const ExperimentConfig c = SmallConfig();
  const DataMatrix d = SmallData(9);
  const PreparedSplit ps = PrepareSplit(d, RepeatSplit(c, d, 0));
  const KlrfsSelection sel = SelectFeatures(ps.train.values, ps.train.labels, 1.0, 4, c);
  const FeatureKernelBank bank(ps.train.values, TargetFromLabels(ps.train.labels), c.gamma_grid);
  const MklSolution direct = GreedySelect(bank, {.p_max = 4, .min_gain = c.min_gain}, 1.0);
  CHECK(sel.solution.selected == direct.selected);
  CHECK(sel.solution.weights == direct.weights);
}

TEST_CASE("cross-validation prefers the informative kernel and keeps ties early") {
  const DataMatrix d = SmallData(11);
  const GramMatrix good = TargetFromLabels(d.labels);
  const GramMatrix flat = GramMatrix::Square(Matrix::Identity(40, 40));
  const GramMatrix* kernels[] = {&flat, &good};
  const std::vector<double> cs = {1.0, 10.0};
  const CvResult cv = CrossValidate(kernels, cs, d.labels, 4, 3, 1e-3);
  CHECK(cv.mean_auc.size() == 4);
  CHECK(cv.best == 2);  // both C values tie at 1.0 on the ideal kernel
  CHECK(cv.mean_auc[2] == 1.0);
  CHECK(cv.mean_auc[3] == 1.0);
}

TEST_CASE("sweep records follow repeat, delta, p order and aggregate correctly") {
  const ExperimentConfig c = SmallConfig();
  const DataMatrix d = SmallData();
  const ExperimentReport rep = RunDeltaSweep(c, d);
  REQUIRE(rep.records.size() == 2 * 2 * 2);
  std::size_t k = 0;
  for (int r = 0; r < 2; ++r) {
    for (double delta : c.delta_grid) {
      for (int p : c.p_select) {
        const RunRecord& rec = rep.records[k++];
        CHECK(rec.repeat == r);
        CHECK(rec.delta == delta);
        CHECK(rec.p == p);
        CHECK(rec.ok);
        CHECK(rec.test_auc >= 0.0);
        CHECK(rec.test_auc <= 1.0);
        CHECK(static_cast<int>(rec.selected.size()) <= p);
      }
    }
  }
  REQUIRE(rep.aggregates.size() == 4);
  for (const AggregateRow& row : rep.aggregates) {
    double sum = 0.0;
    int n = 0;
    for (const RunRecord& rec : rep.records) {
      if (rec.p == row.p && rec.delta == row.delta) {
        sum += rec.test_auc;
        ++n;
      }
    }
    CHECK(row.runs == n);
    CHECK(row.auc_mean == doctest::Approx(sum / n).epsilon(1e-14));
  }
  // Each split seed is shared by all records of one repeat.
  CHECK(rep.records[0].split_seed == rep.records[3].split_seed);
  CHECK(rep.records[0].split_seed != rep.records[4].split_seed);
}

TEST_CASE("benchmark: identical test sets across methods, one row per method and p") {
  const ExperimentConfig c = SmallConfig();
  const DataMatrix d = SmallData();
  const ExperimentReport rep = RunBenchmark(c, d);
  CHECK(rep.records.size() == 2 * 3 * 2);
  CHECK(rep.aggregates.size() == 3 * 2);
  for (const RunRecord& rec : rep.records) {
    CHECK(rec.ok);
    if (rec.method == "klrfs") CHECK(rec.delta == 0.6);
    else CHECK(std::isnan(rec.delta));
    CHECK(rec.split_seed == rep.records[static_cast<std::size_t>(rec.repeat) * 6].split_seed);
  }
  CHECK(RepeatSplit(c, d, 1).test == RepeatSplit(c, d, 1).test);
}

TEST_CASE("runs are deterministic and independent of the worker count") {
  ExperimentConfig c = SmallConfig();
  const DataMatrix d = SmallData();
  const std::string a = ReportJson(RunBenchmark(c, d));
  const std::string b = ReportJson(RunBenchmark(c, d));
  c.jobs = 3;
  const std::string threaded = ReportJson(RunBenchmark(c, d));
  CHECK(a == b);
  CHECK(a == threaded);
}

TEST_CASE("one delta, one p, one repeat gives one record") {
  ExperimentConfig c = SmallConfig();
  c.n_repeats = 1;
  c.delta_grid = {0.4};
  c.p_select = {3};
  const ExperimentReport rep = RunDeltaSweep(c, SmallData());
  CHECK(rep.records.size() == 1);
  CHECK(rep.aggregates.size() == 1);
  CHECK(rep.aggregates[0].auc_std == 0.0);
}

TEST_CASE("failures are recorded and the experiment continues") {
  ExperimentConfig c = SmallConfig();
  c.methods = {"anova", "klrfs"};
  c.p_select = {2, 99};
  const ExperimentReport rep = RunBenchmark(c, SmallData());
  int failed = 0;
  for (const RunRecord& rec : rep.records) {
    if (rec.p == 99 && rec.method == "anova") {
      CHECK_FALSE(rec.ok);
      CHECK_FALSE(rec.error.empty());
      ++failed;
    }
    if (rec.p == 2) CHECK(rec.ok);
  }
  CHECK(failed == 2);
  for (const AggregateRow& row : rep.aggregates) {
    if (row.method == "anova" && row.p == 99) {
      CHECK(row.failures == 2);
      CHECK(row.runs == 0);
      CHECK(std::isnan(row.auc_mean));
    }
  }
  // klrfs clamps p to the available features instead of failing.
  for (const RunRecord& rec : rep.records) {
    if (rec.method == "klrfs" && rec.p == 99) CHECK(rec.ok);
  }
}

TEST_CASE("red is undefined for a single selected feature") {
  ExperimentConfig c = SmallConfig();
  c.n_repeats = 1;
  c.p_select = {1};
  c.methods = {"anova"};
  const ExperimentReport rep = RunBenchmark(c, SmallData());
  REQUIRE(rep.records.size() == 1);
  CHECK_FALSE(rep.records[0].train_red.has_value());
  CHECK(rep.aggregates[0].red_runs == 0);
}

TEST_CASE("select on the whole dataset") {
  ExperimentConfig c = SmallConfig();
  const SyntheticData s = GenerateSynthetic(60, 20, 3, 3.0, 2);
  const SelectOutput out = SelectOnDataset(c, s.data);
  CHECK(out.solution.selected.size() <= 4);
  CHECK(out.feature_names.size() == out.solution.selected.size());
  CHECK(out.kpca_components >= 1);
  // With a strong shift the first pick is planted.
  CHECK(std::find(s.planted.begin(), s.planted.end(), static_cast<std::size_t>(out.solution.selected[0])) !=
        s.planted.end());
  const std::string json = SolutionJson(out, c);
  CHECK(json.find("klrfs-solution") != std::string::npos);
}

TEST_CASE("report serialization") {
  ExperimentConfig c = SmallConfig();
  c.n_repeats = 1;
  c.methods = {"klrfs", "anova"};
  const ExperimentReport rep = RunBenchmark(c, SmallData());
  const std::string json = ReportJson(rep);
  CHECK(json.find("\"schema\"") != std::string::npos);
  CHECK(json.find("null") != std::string::npos);  // baseline delta
  const std::string csv = RecordsCsv(rep);
  CHECK(csv.rfind("method,p,delta,repeat,auc,red\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);
  const std::string agg = AggregatesCsv(rep);
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 1 + 4);
}
