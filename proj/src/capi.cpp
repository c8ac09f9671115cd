#include "klrfs/klrfs.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "klrfs/config.hpp"
#include "klrfs/dataset.hpp"
#include "klrfs/error.hpp"
#include "klrfs/pipeline.hpp"
#include "klrfs/report.hpp"

struct klrfs_config {
  klrfs::ExperimentConfig value;
};

struct klrfs_dataset {
  klrfs::DataMatrix data;
  std::optional<klrfs::SyntheticData> synthetic;  // metadata only; values live in `data`
};

struct klrfs_solution {
  klrfs::SelectOutput output;
  klrfs::ExperimentConfig config;
};

struct klrfs_report {
  klrfs::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;

klrfs_status StatusOf(klrfs::ErrorKind kind) {
  switch (kind) {
    case klrfs::ErrorKind::kData:
    case klrfs::ErrorKind::kIo:
      return KLRFS_ERR_DATA;
    case klrfs::ErrorKind::kParameter:
    case klrfs::ErrorKind::kConfig:
      return KLRFS_ERR_CONFIG;
    case klrfs::ErrorKind::kDegenerate:
    case klrfs::ErrorKind::kNumerical:
      return KLRFS_ERR_NUMERICAL;
  }
  return KLRFS_ERR_INTERNAL;
}

template <typename Fn>
klrfs_status Guard(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return KLRFS_OK;
  } catch (const klrfs::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return KLRFS_ERR_INTERNAL;
}

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void Require(const void* p, const char* what) {
  if (p == nullptr) throw NullArgument(std::string(what) + " is null");
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::string Fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

extern "C" {

const char* klrfs_version(void) { return "1.0.0"; }

const char* klrfs_last_error(void) { return g_last_error.c_str(); }

void klrfs_string_free(char* s) { std::free(s); }

klrfs_status klrfs_config_create(klrfs_config** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new klrfs_config();
  });
}

void klrfs_config_destroy(klrfs_config* config) { delete config; }

klrfs_status klrfs_config_load(klrfs_config* config, const char* path) {
  return Guard([&] {
    Require(config, "config");
    Require(path, "path");
    klrfs::LoadConfigFile(config->value, path);
  });
}

klrfs_status klrfs_config_set(klrfs_config* config, const char* key, const char* value) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    klrfs::SetConfigValue(config->value, key, value);
  });
}

klrfs_status klrfs_config_get(const klrfs_config* config, const char* key, char** value) {
  return Guard([&] {
    Require(config, "config");
    Require(key, "key");
    Require(value, "value");
    *value = Dup(klrfs::GetConfigValue(config->value, key));
  });
}

klrfs_status klrfs_config_validate(const klrfs_config* config) {
  return Guard([&] {
    Require(config, "config");
    klrfs::ValidateConfig(config->value);
  });
}

size_t klrfs_config_key_count(void) { return klrfs::ConfigSchema().size(); }

klrfs_status klrfs_config_key_info(size_t index, const char** name, const char** type, const char** default_value,
                                   const char** help) {
  return Guard([&] {
    const auto& schema = klrfs::ConfigSchema();
    if (index >= schema.size()) throw klrfs::Error(klrfs::ErrorKind::kParameter, "config key index out of range");
    // Defaults rendered once and kept for the process lifetime.
    static const std::vector<std::string> defaults = [] {
      std::vector<std::string> out;
      const klrfs::ExperimentConfig d;
      for (const auto& k : klrfs::ConfigSchema()) out.push_back(klrfs::GetConfigValue(d, k.name));
      return out;
    }();
    if (name) *name = schema[index].name;
    if (type) *type = schema[index].type;
    if (default_value) *default_value = defaults[index].c_str();
    if (help) *help = schema[index].help;
  });
}

klrfs_status klrfs_dataset_load(const klrfs_config* config, const char* path, klrfs_dataset** out) {
  return Guard([&] {
    Require(config, "config");
    Require(path, "path");
    Require(out, "out");
    klrfs::CsvOptions opts{config->value.label_column, config->value.positive_class, config->value.id_column};
    auto ds = std::make_unique<klrfs_dataset>();
    ds->data = klrfs::LoadDataset(path, opts);
    *out = ds.release();
  });
}

klrfs_status klrfs_dataset_synthesize(int64_t samples, int64_t features, int64_t informative, double shift,
                                      uint64_t seed, klrfs_dataset** out) {
  return Guard([&] {
    Require(out, "out");
    auto ds = std::make_unique<klrfs_dataset>();
    klrfs::SyntheticData syn = klrfs::GenerateSynthetic(samples, features, informative, shift, seed);
    ds->data = std::move(syn.data);
    syn.data = klrfs::DataMatrix{};
    ds->synthetic = std::move(syn);
    *out = ds.release();
  });
}

void klrfs_dataset_destroy(klrfs_dataset* dataset) { delete dataset; }

int64_t klrfs_dataset_samples(const klrfs_dataset* dataset) { return dataset ? dataset->data.samples() : -1; }

int64_t klrfs_dataset_features(const klrfs_dataset* dataset) { return dataset ? dataset->data.features() : -1; }

klrfs_status klrfs_dataset_class_counts(const klrfs_dataset* dataset, int64_t* positive, int64_t* negative) {
  return Guard([&] {
    Require(dataset, "dataset");
    int64_t pos = 0, neg = 0;
    for (int y : dataset->data.labels) (y == 1 ? pos : neg)++;
    if (positive) *positive = pos;
    if (negative) *negative = neg;
  });
}

klrfs_status klrfs_dataset_copy_values(const klrfs_dataset* dataset, double* out, size_t count) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(out, "out");
    const auto& v = dataset->data.values;
    if (count < static_cast<size_t>(v.size())) throw klrfs::Error(klrfs::ErrorKind::kParameter, "buffer too small");
    for (klrfs::Index i = 0; i < v.rows(); ++i) {
      for (klrfs::Index j = 0; j < v.cols(); ++j) out[i * v.cols() + j] = v(i, j);
    }
  });
}

klrfs_status klrfs_dataset_copy_labels(const klrfs_dataset* dataset, int* out, size_t count) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(out, "out");
    const auto& y = dataset->data.labels;
    if (count < y.size()) throw klrfs::Error(klrfs::ErrorKind::kParameter, "buffer too small");
    std::copy(y.begin(), y.end(), out);
  });
}

klrfs_status klrfs_dataset_save_csv(const klrfs_dataset* dataset, const char* path, const char* label_column) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(path, "path");
    klrfs::SaveDataset(dataset->data, path, label_column ? label_column : "label");
  });
}

klrfs_status klrfs_dataset_summary_json(const klrfs_dataset* dataset, char** json) {
  return Guard([&] {
    Require(dataset, "dataset");
    Require(json, "json");
    const auto& d = dataset->data;
    nlohmann::ordered_json j;
    int64_t pos = 0, neg = 0;
    for (int y : d.labels) (y == 1 ? pos : neg)++;
    j["samples"] = d.samples();
    j["features"] = d.features();
    j["positive"] = pos;
    j["negative"] = neg;
    std::vector<std::string> constant;
    for (klrfs::Index f = 0; f < d.features(); ++f) {
      if ((d.values.col(f).array() == d.values(0, f)).all()) {
        constant.push_back(d.feature_names.empty() ? std::to_string(f) : d.feature_names[static_cast<size_t>(f)]);
      }
    }
    j["constant_features"] = constant;
    if (dataset->synthetic) {
      const auto& s = *dataset->synthetic;
      j["synthetic"] = {{"seed", s.seed}, {"shift", s.shift}, {"planted", s.planted}};
      std::vector<std::string> names;
      for (size_t k : s.planted) names.push_back(d.feature_names[k]);
      j["synthetic"]["planted_names"] = names;
    }
    *json = Dup(j.dump(2) + "\n");
  });
}

klrfs_status klrfs_select(const klrfs_config* config, const klrfs_dataset* dataset, klrfs_solution** out) {
  return Guard([&] {
    Require(config, "config");
    Require(dataset, "dataset");
    Require(out, "out");
    auto sol = std::make_unique<klrfs_solution>();
    sol->config = config->value;
    sol->output = klrfs::SelectOnDataset(config->value, dataset->data);
    *out = sol.release();
  });
}

void klrfs_solution_destroy(klrfs_solution* solution) { delete solution; }

size_t klrfs_solution_size(const klrfs_solution* solution) {
  return solution ? solution->output.solution.selected.size() : 0;
}

klrfs_status klrfs_solution_feature(const klrfs_solution* solution, size_t rank, int64_t* index, double* weight,
                                    double* gamma) {
  return Guard([&] {
    Require(solution, "solution");
    const auto& s = solution->output.solution;
    if (rank >= s.selected.size()) throw klrfs::Error(klrfs::ErrorKind::kParameter, "rank out of range");
    if (index) *index = s.selected[rank];
    if (weight) *weight = s.weights[rank];
    if (gamma) *gamma = s.gammas[rank];
  });
}

klrfs_status klrfs_solution_json(const klrfs_solution* solution, char** json) {
  return Guard([&] {
    Require(solution, "solution");
    Require(json, "json");
    *json = Dup(klrfs::SolutionJson(solution->output, solution->config));
  });
}

klrfs_status klrfs_solution_feature_list(const klrfs_solution* solution, char** text) {
  return Guard([&] {
    Require(solution, "solution");
    Require(text, "text");
    *text = Dup(klrfs::SolutionFeatureList(solution->output));
  });
}

klrfs_status klrfs_solution_summary(const klrfs_solution* solution, char** text) {
  return Guard([&] {
    Require(solution, "solution");
    Require(text, "text");
    const auto& s = solution->output.solution;
    std::ostringstream os;
    os << "delta " << s.target_delta << ", " << s.selected.size() << " features selected, "
       << solution->output.kpca_components << " kernel PCA components\n";
    os << "  rank  feature               mu        gamma     KTA\n";
    for (size_t k = 0; k < s.selected.size(); ++k) {
      os << "  " << std::setw(4) << k + 1 << "  " << std::left << std::setw(20) << solution->output.feature_names[k]
         << std::right << "  " << Fixed(s.weights[k], 6) << "  " << std::setw(8) << s.gammas[k] << "  "
         << Fixed(s.kta_trace[k], 6) << "\n";
    }
    if (!s.weights_decreasing) os << "  note: weights are not strictly decreasing in selection order\n";
    *text = Dup(os.str());
  });
}

klrfs_status klrfs_run(const klrfs_config* config, const klrfs_dataset* dataset, klrfs_experiment experiment,
                       klrfs_report** out) {
  return Guard([&] {
    Require(config, "config");
    Require(dataset, "dataset");
    Require(out, "out");
    auto rep = std::make_unique<klrfs_report>();
    switch (experiment) {
      case KLRFS_EXPERIMENT_EVALUATE:
        rep->report = klrfs::RunEvaluate(config->value, dataset->data);
        break;
      case KLRFS_EXPERIMENT_SWEEP_DELTA:
        rep->report = klrfs::RunDeltaSweep(config->value, dataset->data);
        break;
      case KLRFS_EXPERIMENT_BENCHMARK:
        rep->report = klrfs::RunBenchmark(config->value, dataset->data);
        break;
      default:
        throw klrfs::Error(klrfs::ErrorKind::kParameter, "unknown experiment kind");
    }
    *out = rep.release();
  });
}

void klrfs_report_destroy(klrfs_report* report) { delete report; }

size_t klrfs_report_record_count(const klrfs_report* report) { return report ? report->report.records.size() : 0; }

size_t klrfs_report_failure_count(const klrfs_report* report) {
  if (!report) return 0;
  size_t n = 0;
  for (const auto& r : report->report.records) n += r.ok ? 0 : 1;
  return n;
}

klrfs_status klrfs_report_json(const klrfs_report* report, char** json) {
  return Guard([&] {
    Require(report, "report");
    Require(json, "json");
    *json = Dup(klrfs::ReportJson(report->report));
  });
}

klrfs_status klrfs_report_records_csv(const klrfs_report* report, char** csv) {
  return Guard([&] {
    Require(report, "report");
    Require(csv, "csv");
    *csv = Dup(klrfs::RecordsCsv(report->report));
  });
}

klrfs_status klrfs_report_aggregates_csv(const klrfs_report* report, char** csv) {
  return Guard([&] {
    Require(report, "report");
    Require(csv, "csv");
    *csv = Dup(klrfs::AggregatesCsv(report->report));
  });
}

klrfs_status klrfs_report_summary(const klrfs_report* report, char** text) {
  return Guard([&] {
    Require(report, "report");
    Require(text, "text");
    const auto& r = report->report;
    std::ostringstream os;
    os << r.kind << ": " << r.records.size() << " runs on " << r.samples << " samples x " << r.features
       << " features\n";
    os << "  method    p    delta  runs  fail  AUC mean +- sd      RED mean +- sd\n";
    for (const auto& a : r.aggregates) {
      os << "  " << std::left << std::setw(8) << a.method << std::right << std::setw(4) << a.p << "  "
         << std::setw(6) << (std::isnan(a.delta) ? std::string("-") : Fixed(a.delta, 2)) << "  " << std::setw(4)
         << a.runs << "  " << std::setw(4) << a.failures << "  " << Fixed(a.auc_mean) << " +- " << Fixed(a.auc_std)
         << "   " << Fixed(a.red_mean) << " +- " << Fixed(a.red_std) << "\n";
    }
    for (const auto& rec : r.records) {
      if (!rec.ok) {
        os << "  failed: " << rec.method << " p=" << rec.p << " repeat=" << rec.repeat << ": " << rec.error << "\n";
      }
    }
    *text = Dup(os.str());
  });
}

}  // extern "C"
