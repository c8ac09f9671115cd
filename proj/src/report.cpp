#include "klrfs/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "klrfs/error.hpp"

namespace klrfs {

namespace {

using Json = nlohmann::ordered_json;

Json Num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string Csv(double v) {
  if (!std::isfinite(v)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Json ConfigJson(const ExperimentConfig& config) {
  Json j = Json::object();
  for (const auto& key : ConfigSchema()) {
    // Worker and cache settings do not change results; leaving them out
    // keeps reports byte-identical across --jobs values.
    const std::string name = key.name;
    if (name == "jobs" || name == "cache_mb" || name.rfind("synth_", 0) == 0) continue;
    j[name] = GetConfigValue(config, name);
  }
  return j;
}

Json RecordJson(const RunRecord& r) {
  Json j;
  j["method"] = r.method;
  j["p"] = r.p;
  j["delta"] = Num(r.delta);
  j["repeat"] = r.repeat;
  j["split_seed"] = r.split_seed;
  j["ok"] = r.ok;
  if (!r.ok) {
    j["error"] = r.error;
    return j;
  }
  j["selected"] = r.selected;
  j["selected_names"] = r.selected_names;
  if (r.method == "klrfs") {
    j["mu"] = r.weights;
    j["feature_gammas"] = r.feature_gammas;
    j["kta_trace"] = r.kta_trace;
    j["weights_decreasing"] = r.weights_decreasing;
    j["kpca_components"] = r.kpca_components;
    j["gamma_z"] = Num(r.gamma_z);
  } else {
    j["svm_gamma"] = Num(r.svm_gamma);
  }
  j["C"] = Num(r.C);
  j["cv_auc"] = Num(r.cv_auc);
  j["test_auc"] = Num(r.test_auc);
  j["train_red"] = r.train_red ? Num(*r.train_red) : Json(nullptr);
  return j;
}

}  // namespace

std::string ReportJson(const ExperimentReport& report) {
  Json j;
  j["schema"] = "klrfs-report";
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = report.kind;
  j["dataset"] = {{"samples", report.samples}, {"features", report.features}};
  j["config"] = ConfigJson(report.config);
  Json records = Json::array();
  for (const auto& r : report.records) records.push_back(RecordJson(r));
  j["records"] = std::move(records);
  Json aggs = Json::array();
  for (const auto& a : report.aggregates) {
    aggs.push_back({{"method", a.method},
                    {"p", a.p},
                    {"delta", Num(a.delta)},
                    {"runs", a.runs},
                    {"failures", a.failures},
                    {"auc_mean", Num(a.auc_mean)},
                    {"auc_std", Num(a.auc_std)},
                    {"red_runs", a.red_runs},
                    {"red_mean", Num(a.red_mean)},
                    {"red_std", Num(a.red_std)}});
  }
  j["aggregates"] = std::move(aggs);
  return j.dump(2) + "\n";
}

std::string RecordsCsv(const ExperimentReport& report) {
  std::string out = "method,p,delta,repeat,auc,red\n";
  for (const auto& r : report.records) {
    out += r.method + "," + std::to_string(r.p) + "," + Csv(r.delta) + "," + std::to_string(r.repeat) + ",";
    if (r.ok) {
      out += Csv(r.test_auc) + "," + (r.train_red ? Csv(*r.train_red) : std::string());
    } else {
      out += ",";
    }
    out += "\n";
  }
  return out;
}

std::string AggregatesCsv(const ExperimentReport& report) {
  std::string out = "method,p,delta,runs,failures,auc_mean,auc_std,red_mean,red_std\n";
  for (const auto& a : report.aggregates) {
    out += a.method + "," + std::to_string(a.p) + "," + Csv(a.delta) + "," + std::to_string(a.runs) + "," +
           std::to_string(a.failures) + "," + Csv(a.auc_mean) + "," + Csv(a.auc_std) + "," + Csv(a.red_mean) +
           "," + Csv(a.red_std) + "\n";
  }
  return out;
}

std::string SolutionJson(const SelectOutput& selection, const ExperimentConfig& config) {
  const MklSolution& s = selection.solution;
  Json j;
  j["schema"] = "klrfs-solution";
  j["schema_version"] = kReportSchemaVersion;
  j["delta"] = s.target_delta;
  j["p_max"] = *std::max_element(config.p_select.begin(), config.p_select.end());
  j["selected"] = s.selected;
  j["selected_names"] = selection.feature_names;
  j["mu"] = s.weights;
  j["gammas"] = s.gammas;
  j["kta_trace"] = s.kta_trace;
  j["weights_decreasing"] = s.weights_decreasing;
  j["kpca_components"] = selection.kpca_components;
  j["gamma_z"] = Num(selection.gamma_z);
  j["config"] = ConfigJson(config);
  return j.dump(2) + "\n";
}

std::string SolutionFeatureList(const SelectOutput& selection) {
  std::string out;
  for (const auto& name : selection.feature_names) out += name + "\n";
  return out;
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  out << contents;
  if (!out) Fail(ErrorKind::kIo, "write failed for " + path);
}

}  // namespace klrfs
