#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace klrfs {

// Everything an experiment needs. Defaults reproduce the published
// protocol: 80/20 stratified splits repeated 5 times, 5-fold CV, six
// mixture coefficients, C and gamma grids of four values each.
struct ExperimentConfig {
  std::string data;
  std::string label_column = "label";
  std::string positive_class = "1";
  std::string id_column;

  std::vector<std::string> methods = {"klrfs", "anova", "svm-rfe"};
  std::string external_ranking;

  std::vector<int> p_select = {10, 20, 30, 40, 50};
  std::vector<double> delta_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  double delta = 0.6;
  std::vector<double> gamma_grid = {0.01, 0.1, 1.0, 10.0};
  std::vector<double> c_grid = {0.1, 1.0, 10.0, 100.0};

  int n_repeats = 5;
  int cv_folds = 5;
  double train_fraction = 0.8;
  std::uint64_t seed = 42;

  double min_gain = 1e-6;
  int kpca_components = 0;
  double kpca_variance = 0.95;
  int kpca_max_components = 50;
  double svc_tol = 1e-3;
  double rfe_drop_fraction = 0.1;
  double rfe_c = 1.0;
  int jobs = 1;
  int cache_mb = 1024;

  int synth_samples = 120;
  int synth_features = 500;
  int synth_informative = 10;
  double synth_shift = 1.5;
};

struct ConfigKey {
  const char* name;
  const char* type;  // "string", "int", "real", "int-list", "real-list", "string-list"
  const char* help;
};

const std::vector<ConfigKey>& ConfigSchema();

// Applies one key=value assignment; unknown keys and ill-typed values throw
// kConfig naming the key.
void SetConfigValue(ExperimentConfig& config, const std::string& key, const std::string& value);

// Current value of a key rendered in the file syntax.
std::string GetConfigValue(const ExperimentConfig& config, const std::string& key);

// Plain-text file, one `key = value` per line, `#` starts a comment.
void LoadConfigFile(ExperimentConfig& config, const std::string& path);

// Cross-field checks (grids non-empty, fractions in range, ...).
void ValidateConfig(const ExperimentConfig& config);

}  // namespace klrfs
