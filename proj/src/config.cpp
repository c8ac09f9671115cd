#include "klrfs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "klrfs/error.hpp"

namespace klrfs {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  std::istringstream in(value);
  while (std::getline(in, cur, ',')) {
    cur = Trim(cur);
    if (!cur.empty()) items.push_back(cur);
  }
  return items;
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value, const char* expected) {
  Fail(ErrorKind::kConfig, "config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double ParseReal(const std::string& key, const std::string& text) {
  double v = 0.0;
  const std::string t = Trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) BadValue(key, text, "a real number");
  return v;
}

long long ParseInt(const std::string& key, const std::string& text) {
  long long v = 0;
  const std::string t = Trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) BadValue(key, text, "an integer");
  return v;
}

int ParseInt32(const std::string& key, const std::string& text) {
  const long long v = ParseInt(key, text);
  if (v < -2147483647LL || v > 2147483647LL) BadValue(key, text, "a 32-bit integer");
  return static_cast<int>(v);
}

std::string FormatReal(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T, typename F>
std::string Join(const std::vector<T>& items, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += fmt(items[i]);
  }
  return out;
}

struct Field {
  ConfigKey key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define KLRFS_STRING(name, member, help)                                                        \
  Field {                                                                                       \
    {name, "string", help}, [](ExperimentConfig& c, const std::string& v) { c.member = Trim(v); }, \
        [](const ExperimentConfig& c) { return c.member; }                                      \
  }
#define KLRFS_INT(name, member, help)                                                                    \
  Field {                                                                                                \
    {name, "int", help}, [](ExperimentConfig& c, const std::string& v) { c.member = ParseInt32(name, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }                               \
  }
#define KLRFS_REAL(name, member, help)                                                                  \
  Field {                                                                                               \
    {name, "real", help}, [](ExperimentConfig& c, const std::string& v) { c.member = ParseReal(name, v); }, \
        [](const ExperimentConfig& c) { return FormatReal(c.member); }                                  \
  }
#define KLRFS_REAL_LIST(name, member, help)                                                  \
  Field {                                                                                    \
    {name, "real-list", help},                                                               \
        [](ExperimentConfig& c, const std::string& v) {                                      \
          std::vector<double> out;                                                           \
          for (const auto& item : SplitList(v)) out.push_back(ParseReal(name, item));        \
          if (out.empty()) BadValue(name, v, "a non-empty comma-separated list");            \
          c.member = std::move(out);                                                         \
        },                                                                                   \
        [](const ExperimentConfig& c) { return Join(c.member, FormatReal); }                 \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      KLRFS_STRING("data", data, "dataset CSV path"),
      KLRFS_STRING("label_column", label_column, "name of the class label column"),
      KLRFS_STRING("positive_class", positive_class, "label value mapped to the positive class"),
      KLRFS_STRING("id_column", id_column, "optional sample-id column to ignore"),
      Field{{"methods", "string-list", "benchmark selectors: klrfs, anova, svm-rfe, external"},
            [](ExperimentConfig& c, const std::string& v) {
              auto items = SplitList(v);
              if (items.empty()) BadValue("methods", v, "a non-empty comma-separated list");
              for (const auto& m : items) {
                if (m != "klrfs" && m != "anova" && m != "svm-rfe" && m != "external") {
                  BadValue("methods", m, "one of klrfs, anova, svm-rfe, external");
                }
              }
              c.methods = std::move(items);
            },
            [](const ExperimentConfig& c) { return Join(c.methods, [](const std::string& s) { return s; }); }},
      KLRFS_STRING("external_ranking", external_ranking, "ranking file for the 'external' method, one feature per line"),
      Field{{"p_select", "int-list", "numbers of features to select"},
            [](ExperimentConfig& c, const std::string& v) {
              std::vector<int> out;
              for (const auto& item : SplitList(v)) out.push_back(ParseInt32("p_select", item));
              if (out.empty()) BadValue("p_select", v, "a non-empty comma-separated list");
              c.p_select = std::move(out);
            },
            [](const ExperimentConfig& c) { return Join(c.p_select, [](int p) { return std::to_string(p); }); }},
      KLRFS_REAL_LIST("delta_grid", delta_grid, "mixture coefficients for sweep-delta"),
      KLRFS_REAL("delta", delta, "mixture coefficient for select, evaluate and benchmark"),
      KLRFS_REAL_LIST("gamma_grid", gamma_grid, "RBF bandwidths for feature kernels and baseline SVMs"),
      KLRFS_REAL_LIST("C_grid", c_grid, "SVM C values searched by cross-validation"),
      KLRFS_INT("n_repeats", n_repeats, "number of random train/test splits"),
      KLRFS_INT("cv_folds", cv_folds, "cross-validation folds on the training split"),
      KLRFS_REAL("train_fraction", train_fraction, "fraction of samples in the training split"),
      Field{{"seed", "int", "master random seed"},
            [](ExperimentConfig& c, const std::string& v) {
              const long long s = ParseInt("seed", v);
              if (s < 0) BadValue("seed", v, "a non-negative integer");
              c.seed = static_cast<std::uint64_t>(s);
            },
            [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      KLRFS_REAL("min_gain", min_gain, "greedy MKL stops when the alignment gain is at most this"),
      KLRFS_INT("kpca_components", kpca_components, "kernel PCA components, 0 = by explained variance"),
      KLRFS_REAL("kpca_variance", kpca_variance, "eigenvalue mass retained when kpca_components = 0"),
      KLRFS_INT("kpca_max_components", kpca_max_components, "cap on automatically chosen components"),
      KLRFS_REAL("svc_tol", svc_tol, "SMO KKT tolerance"),
      KLRFS_REAL("rfe_drop_fraction", rfe_drop_fraction, "fraction of features SVM-RFE drops per round"),
      KLRFS_REAL("rfe_C", rfe_c, "C of the linear SVM inside SVM-RFE"),
      KLRFS_INT("jobs", jobs, "worker threads"),
      KLRFS_INT("cache_mb", cache_mb, "memory budget for cached feature kernels (MiB)"),
      KLRFS_INT("synth_samples", synth_samples, "synth: number of samples"),
      KLRFS_INT("synth_features", synth_features, "synth: number of features"),
      KLRFS_INT("synth_informative", synth_informative, "synth: number of planted informative features"),
      KLRFS_REAL("synth_shift", synth_shift, "synth: class mean gap in within-class standard deviations"),
  };
  return fields;
}

#undef KLRFS_STRING
#undef KLRFS_INT
#undef KLRFS_REAL
#undef KLRFS_REAL_LIST

const Field& FindField(const std::string& key) {
  for (const auto& f : Fields()) {
    if (key == f.key.name) return f;
  }
  Fail(ErrorKind::kConfig, "unknown config key '" + key + "'");
}

}  // namespace

const std::vector<ConfigKey>& ConfigSchema() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& f : Fields()) out.push_back(f.key);
    return out;
  }();
  return keys;
}

void SetConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value) {
  FindField(Trim(key)).set(config, value);
}

std::string GetConfigValue(const ExperimentConfig& config, const std::string& key) {
  return FindField(key).get(config);
}

void LoadConfigFile(ExperimentConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kConfig, "cannot open config file " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (Trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      Fail(ErrorKind::kConfig, path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      SetConfigValue(config, Trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      Fail(ErrorKind::kConfig, path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void ValidateConfig(const ExperimentConfig& c) {
  auto bad = [](const std::string& what) { Fail(ErrorKind::kConfig, what); };
  if (c.label_column.empty()) bad("label_column must not be empty");
  if (c.p_select.empty()) bad("p_select must not be empty");
  for (int p : c.p_select) {
    if (p < 1) bad("p_select values must be >= 1");
  }
  if (c.delta_grid.empty()) bad("delta_grid must not be empty");
  for (double d : c.delta_grid) {
    if (!(d >= 0.0 && d <= 1.0)) bad("delta_grid values must lie in [0, 1]");
  }
  if (!(c.delta >= 0.0 && c.delta <= 1.0)) bad("delta must lie in [0, 1]");
  if (c.gamma_grid.empty()) bad("gamma_grid must not be empty");
  for (double g : c.gamma_grid) {
    if (!(g > 0.0)) bad("gamma_grid values must be positive");
  }
  if (c.c_grid.empty()) bad("C_grid must not be empty");
  for (double v : c.c_grid) {
    if (!(v > 0.0)) bad("C_grid values must be positive");
  }
  if (c.n_repeats < 1) bad("n_repeats must be >= 1");
  if (c.cv_folds < 2) bad("cv_folds must be >= 2");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) bad("train_fraction must lie in (0, 1)");
  if (!(c.min_gain >= 0.0)) bad("min_gain must be >= 0");
  if (c.kpca_components < 0) bad("kpca_components must be >= 0");
  if (!(c.kpca_variance > 0.0 && c.kpca_variance <= 1.0)) bad("kpca_variance must lie in (0, 1]");
  if (c.kpca_max_components < 1) bad("kpca_max_components must be >= 1");
  if (!(c.svc_tol > 0.0)) bad("svc_tol must be positive");
  if (!(c.rfe_drop_fraction > 0.0 && c.rfe_drop_fraction < 1.0)) bad("rfe_drop_fraction must lie in (0, 1)");
  if (!(c.rfe_c > 0.0)) bad("rfe_C must be positive");
  if (c.jobs < 1) bad("jobs must be >= 1");
  if (c.cache_mb < 0) bad("cache_mb must be >= 0");
  if (c.methods.empty()) bad("methods must not be empty");
  for (const auto& m : c.methods) {
    if (m != "klrfs" && m != "anova" && m != "svm-rfe" && m != "external") bad("unknown method '" + m + "'");
    if (m == "external" && c.external_ranking.empty()) bad("method 'external' needs external_ranking");
  }
}

}  // namespace klrfs
