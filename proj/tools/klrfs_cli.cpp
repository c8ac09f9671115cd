// Command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "klrfs/klrfs.h"

namespace {

namespace fs = std::filesystem;

struct Failure {
  int code;
  std::string message;
};

void Check(klrfs_status status, const std::string& context) {
  if (status != KLRFS_OK) throw Failure{static_cast<int>(status), context + ": " + klrfs_last_error()};
}

struct CStringDeleter {
  void operator()(char* s) const { klrfs_string_free(s); }
};
using CString = std::unique_ptr<char, CStringDeleter>;

template <typename T, void (*Destroy)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Destroy(p); }
};
using Config = std::unique_ptr<klrfs_config, HandleDeleter<klrfs_config, klrfs_config_destroy>>;
using Dataset = std::unique_ptr<klrfs_dataset, HandleDeleter<klrfs_dataset, klrfs_dataset_destroy>>;
using Solution = std::unique_ptr<klrfs_solution, HandleDeleter<klrfs_solution, klrfs_solution_destroy>>;
using Report = std::unique_ptr<klrfs_report, HandleDeleter<klrfs_report, klrfs_report_destroy>>;

struct CommonArgs {
  std::string config_path;
  std::string data;
  std::string out = ".";
  std::string seed;
  std::string jobs;
  std::string delta;
  std::string p_select;
  std::vector<std::string> methods;
  std::vector<std::string> overrides;
};

void AddCommon(CLI::App* cmd, CommonArgs& a, bool experiment) {
  cmd->add_option("--config", a.config_path, "key = value configuration file");
  cmd->add_option("--data", a.data, "dataset CSV (overrides config key 'data')");
  cmd->add_option("--out", a.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", a.seed, "master random seed");
  cmd->add_option("--jobs", a.jobs, "worker threads");
  if (experiment) {
    cmd->add_option("--delta", a.delta, "mixture coefficient delta in [0, 1]");
    cmd->add_option("--p-select", a.p_select, "feature counts, comma-separated");
    cmd->add_option("--method", a.methods, "benchmark methods (klrfs, anova, svm-rfe, external)")->delimiter(',');
  }
  cmd->add_option("--set,overrides", a.overrides, "configuration overrides as key=value");
}

std::string Join(const std::vector<std::string>& v) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

Config BuildConfig(const CommonArgs& a) {
  klrfs_config* raw = nullptr;
  Check(klrfs_config_create(&raw), "config");
  Config config(raw);
  if (!a.config_path.empty()) Check(klrfs_config_load(config.get(), a.config_path.c_str()), "config");
  auto set = [&](const char* key, const std::string& value) {
    if (!value.empty()) Check(klrfs_config_set(config.get(), key, value.c_str()), std::string("--") + key);
  };
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{KLRFS_ERR_CONFIG, "override '" + kv + "' is not key=value"};
    Check(klrfs_config_set(config.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "override");
  }
  set("data", a.data);
  set("seed", a.seed);
  set("jobs", a.jobs);
  set("delta", a.delta);
  set("p_select", a.p_select);
  if (!a.methods.empty()) set("methods", Join(a.methods));
  Check(klrfs_config_validate(config.get()), "config");
  return config;
}

std::string GetKey(const Config& config, const char* key) {
  char* raw = nullptr;
  Check(klrfs_config_get(config.get(), key, &raw), "config");
  CString value(raw);
  return value.get();
}

Dataset LoadData(const Config& config) {
  const std::string path = GetKey(config, "data");
  if (path.empty()) throw Failure{KLRFS_ERR_CONFIG, "no dataset given (use --data or the 'data' key)"};
  klrfs_dataset* raw = nullptr;
  Check(klrfs_dataset_load(config.get(), path.c_str(), &raw), "dataset");
  return Dataset(raw);
}

fs::path PrepareOut(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Failure{KLRFS_ERR_DATA, "cannot create output directory " + out + ": " + ec.message()};
  return fs::path(out);
}

void Write(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  f << contents;
  if (!f) throw Failure{KLRFS_ERR_DATA, "cannot write " + path.string()};
}

// Timestamps live only in this sidecar so result files stay reproducible.
void AppendLog(const fs::path& dir, const std::string& line) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream log(dir / "klrfs.log", std::ios::app);
  log << stamp << ' ' << line << '\n';
}

// Calls a C API function that returns an allocated string through its last
// argument.
template <typename Fn>
std::string Fetch(Fn&& fn, const std::string& context) {
  char* raw = nullptr;
  const klrfs_status status = fn(&raw);
  CString s(raw);
  Check(status, context);
  return s.get();
}

int RunSelect(const CommonArgs& a) {
  Config config = BuildConfig(a);
  Dataset data = LoadData(config);
  klrfs_solution* raw = nullptr;
  Check(klrfs_select(config.get(), data.get(), &raw), "select");
  Solution sol(raw);
  const fs::path dir = PrepareOut(a.out);
  Write(dir / "solution.json", Fetch([&](char** o) { return klrfs_solution_json(sol.get(), o); }, "select"));
  Write(dir / "selected_features.txt",
        Fetch([&](char** o) { return klrfs_solution_feature_list(sol.get(), o); }, "select"));
  std::cout << Fetch([&](char** o) { return klrfs_solution_summary(sol.get(), o); }, "select");
  std::cout << "wrote " << (dir / "solution.json").string() << " and " << (dir / "selected_features.txt").string()
            << "\n";
  AppendLog(dir, "select data=" + GetKey(config, "data") + " seed=" + GetKey(config, "seed"));
  return 0;
}

int RunExperiment(const CommonArgs& a, klrfs_experiment kind, const std::string& name) {
  Config config = BuildConfig(a);
  Dataset data = LoadData(config);
  klrfs_report* raw = nullptr;
  Check(klrfs_run(config.get(), data.get(), kind, &raw), name);
  Report report(raw);
  const fs::path dir = PrepareOut(a.out);
  Write(dir / "report.json", Fetch([&](char** o) { return klrfs_report_json(report.get(), o); }, name));
  Write(dir / "records.csv", Fetch([&](char** o) { return klrfs_report_records_csv(report.get(), o); }, name));
  Write(dir / "aggregates.csv",
        Fetch([&](char** o) { return klrfs_report_aggregates_csv(report.get(), o); }, name));
  std::cout << Fetch([&](char** o) { return klrfs_report_summary(report.get(), o); }, name);
  std::cout << "wrote report.json, records.csv, aggregates.csv to " << dir.string() << "\n";
  AppendLog(dir, name + " data=" + GetKey(config, "data") + " seed=" + GetKey(config, "seed") + " records=" +
                     std::to_string(klrfs_report_record_count(report.get())) + " failures=" +
                     std::to_string(klrfs_report_failure_count(report.get())));
  // Failed repeats are recorded in the report; the sweep itself succeeded.
  return 0;
}

struct SynthArgs {
  std::string samples, features, informative, shift, name = "synthetic";
};

int RunSynth(const CommonArgs& a, const SynthArgs& s) {
  CommonArgs copy = a;
  if (!s.samples.empty()) copy.overrides.push_back("synth_samples=" + s.samples);
  if (!s.features.empty()) copy.overrides.push_back("synth_features=" + s.features);
  if (!s.informative.empty()) copy.overrides.push_back("synth_informative=" + s.informative);
  if (!s.shift.empty()) copy.overrides.push_back("synth_shift=" + s.shift);
  Config config = BuildConfig(copy);
  klrfs_dataset* raw = nullptr;
  Check(klrfs_dataset_synthesize(std::stoll(GetKey(config, "synth_samples")),
                                 std::stoll(GetKey(config, "synth_features")),
                                 std::stoll(GetKey(config, "synth_informative")),
                                 std::stod(GetKey(config, "synth_shift")),
                                 std::stoull(GetKey(config, "seed")), &raw),
        "synth");
  Dataset data(raw);
  const fs::path dir = PrepareOut(a.out);
  const fs::path csv = dir / (s.name + ".csv");
  Check(klrfs_dataset_save_csv(data.get(), csv.string().c_str(), GetKey(config, "label_column").c_str()), "synth");
  Write(dir / (s.name + ".meta.json"),
        Fetch([&](char** o) { return klrfs_dataset_summary_json(data.get(), o); }, "synth"));
  std::cout << "wrote " << csv.string() << " (" << klrfs_dataset_samples(data.get()) << " samples x "
            << klrfs_dataset_features(data.get()) << " features) and " << (dir / (s.name + ".meta.json")).string()
            << "\n";
  AppendLog(dir, "synth seed=" + GetKey(config, "seed"));
  return 0;
}

int RunValidate(const CommonArgs& a) {
  Config config = BuildConfig(a);
  Dataset data = LoadData(config);
  const std::string summary =
      Fetch([&](char** o) { return klrfs_dataset_summary_json(data.get(), o); }, "validate-data");
  std::cout << summary;
  return 0;
}

std::string ConfigKeysHelp() {
  std::ostringstream os;
  os << "\nConfiguration keys (config file, --set key=value, or trailing key=value):\n";
  for (size_t i = 0; i < klrfs_config_key_count(); ++i) {
    const char *name = nullptr, *type = nullptr, *def = nullptr, *help = nullptr;
    if (klrfs_config_key_info(i, &name, &type, &def, &help) != KLRFS_OK) continue;
    os << "  " << name << " (" << type << ", default: " << (def[0] ? def : "\"\"") << ")\n      " << help << "\n";
  }
  os << "\nExit codes: 0 success, 1 data error, 2 configuration error, 3 numerical failure.\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature selection by kernel target alignment with latent regularization"};
  app.footer(ConfigKeysHelp());
  app.require_subcommand(1);
  app.set_version_flag("--version", klrfs_version());

  CommonArgs args;
  SynthArgs synth;
  auto* select = app.add_subcommand("select", "select features on a full dataset, write solution.json");
  AddCommon(select, args, true);
  auto* evaluate = app.add_subcommand("evaluate", "KLR-FS at one delta over repeated train/test splits");
  AddCommon(evaluate, args, true);
  auto* sweep = app.add_subcommand("sweep-delta", "KLR-FS over the delta grid");
  AddCommon(sweep, args, true);
  auto* bench = app.add_subcommand("benchmark", "KLR-FS against baseline selectors on identical splits");
  AddCommon(bench, args, true);
  auto* syn = app.add_subcommand("synth", "write a synthetic dataset with planted informative features");
  AddCommon(syn, args, false);
  syn->add_option("--samples", synth.samples, "number of samples");
  syn->add_option("--features", synth.features, "number of features");
  syn->add_option("--informative", synth.informative, "number of planted informative features");
  syn->add_option("--shift", synth.shift, "class mean gap in standard deviations");
  syn->add_option("--name", synth.name, "output file stem")->capture_default_str();
  auto* validate = app.add_subcommand("validate-data", "parse a dataset and print its statistics");
  AddCommon(validate, args, false);
  for (auto* cmd : {select, evaluate, sweep, bench, syn, validate}) cmd->footer(ConfigKeysHelp());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : KLRFS_ERR_CONFIG;
  }

  try {
    if (*select) return RunSelect(args);
    if (*evaluate) return RunExperiment(args, KLRFS_EXPERIMENT_EVALUATE, "evaluate");
    if (*sweep) return RunExperiment(args, KLRFS_EXPERIMENT_SWEEP_DELTA, "sweep-delta");
    if (*bench) return RunExperiment(args, KLRFS_EXPERIMENT_BENCHMARK, "benchmark");
    if (*syn) return RunSynth(args, synth);
    if (*validate) return RunValidate(args);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return KLRFS_ERR_INTERNAL;
  }
  return 0;
}
