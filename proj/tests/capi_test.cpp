#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "klrfs/klrfs.h"

namespace {

std::string Take(char* s) {
  std::string out = s ? s : "";
  klrfs_string_free(s);
  return out;
}

klrfs_config* SmallConfig() {
  klrfs_config* c = nullptr;
  REQUIRE(klrfs_config_create(&c) == KLRFS_OK);
  REQUIRE(klrfs_config_set(c, "n_repeats", "1") == KLRFS_OK);
  REQUIRE(klrfs_config_set(c, "cv_folds", "3") == KLRFS_OK);
  REQUIRE(klrfs_config_set(c, "p_select", "2,3") == KLRFS_OK);
  REQUIRE(klrfs_config_set(c, "delta_grid", "0,1") == KLRFS_OK);
  REQUIRE(klrfs_config_set(c, "C_grid", "1") == KLRFS_OK);
  REQUIRE(klrfs_config_set(c, "gamma_grid", "0.1,1") == KLRFS_OK);
  return c;
}

}  // namespace

TEST_CASE("version and config keys") {
  CHECK(std::strlen(klrfs_version()) > 0);
  const std::size_t n = klrfs_config_key_count();
  CHECK(n > 10);
  const char *name, *type, *def, *help;
  REQUIRE(klrfs_config_key_info(0, &name, &type, &def, &help) == KLRFS_OK);
  CHECK(std::strlen(name) > 0);
  CHECK(klrfs_config_key_info(n, &name, &type, &def, &help) == KLRFS_ERR_CONFIG);
}

TEST_CASE("config get, set and error codes") {
  klrfs_config* c = nullptr;
  REQUIRE(klrfs_config_create(&c) == KLRFS_OK);
  char* value = nullptr;
  REQUIRE(klrfs_config_get(c, "n_repeats", &value) == KLRFS_OK);
  CHECK(Take(value) == "5");
  CHECK(klrfs_config_set(c, "nope", "1") == KLRFS_ERR_CONFIG);
  CHECK(std::string(klrfs_last_error()).find("nope") != std::string::npos);
  CHECK(klrfs_config_set(c, "delta", "2") == KLRFS_OK);
  CHECK(klrfs_config_validate(c) == KLRFS_ERR_CONFIG);
  CHECK(klrfs_config_load(c, "/nonexistent/klrfs.cfg") != KLRFS_OK);
  klrfs_config_destroy(c);
  CHECK(klrfs_config_set(nullptr, "seed", "1") == KLRFS_ERR_INTERNAL);
  klrfs_config_destroy(nullptr);
}

TEST_CASE("dataset handles") {
  klrfs_dataset* d = nullptr;
  REQUIRE(klrfs_dataset_synthesize(30, 8, 2, 2.0, 4, &d) == KLRFS_OK);
  CHECK(klrfs_dataset_samples(d) == 30);
  CHECK(klrfs_dataset_features(d) == 8);
  int64_t pos = 0, neg = 0;
  REQUIRE(klrfs_dataset_class_counts(d, &pos, &neg) == KLRFS_OK);
  CHECK(pos == 15);
  CHECK(neg == 15);
  std::vector<double> values(30 * 8);
  CHECK(klrfs_dataset_copy_values(d, values.data(), values.size()) == KLRFS_OK);
  CHECK(klrfs_dataset_copy_values(d, values.data(), 3) == KLRFS_ERR_CONFIG);
  std::vector<int> labels(30);
  CHECK(klrfs_dataset_copy_labels(d, labels.data(), labels.size()) == KLRFS_OK);
  char* summary = nullptr;
  REQUIRE(klrfs_dataset_summary_json(d, &summary) == KLRFS_OK);
  CHECK(Take(summary).find("planted") != std::string::npos);

  const auto path = (std::filesystem::temp_directory_path() / "klrfs_capi.csv").string();
  REQUIRE(klrfs_dataset_save_csv(d, path.c_str(), "label") == KLRFS_OK);
  klrfs_config* c = SmallConfig();
  klrfs_dataset* back = nullptr;
  REQUIRE(klrfs_dataset_load(c, path.c_str(), &back) == KLRFS_OK);
  std::vector<double> again(30 * 8);
  klrfs_dataset_copy_values(back, again.data(), again.size());
  CHECK(again == values);
  klrfs_dataset_destroy(back);
  std::filesystem::remove(path);

  klrfs_dataset* missing = nullptr;
  CHECK(klrfs_dataset_load(c, "/nonexistent/x.csv", &missing) == KLRFS_ERR_DATA);
  CHECK(missing == nullptr);
  CHECK(klrfs_dataset_synthesize(10, 3, 5, 1.0, 1, &missing) != KLRFS_OK);
  klrfs_config_destroy(c);
  klrfs_dataset_destroy(d);
}

TEST_CASE("select and run through the C interface") {
  klrfs_config* c = SmallConfig();
  klrfs_dataset* d = nullptr;
  REQUIRE(klrfs_dataset_synthesize(40, 10, 2, 2.5, 8, &d) == KLRFS_OK);

  klrfs_solution* s = nullptr;
  REQUIRE(klrfs_select(c, d, &s) == KLRFS_OK);
  REQUIRE(klrfs_solution_size(s) >= 1);
  CHECK(klrfs_solution_size(s) <= 3);
  int64_t index = -1;
  double weight = 0.0, gamma = 0.0;
  REQUIRE(klrfs_solution_feature(s, 0, &index, &weight, &gamma) == KLRFS_OK);
  CHECK(index >= 0);
  CHECK(weight > 0.0);
  CHECK(gamma > 0.0);
  CHECK(klrfs_solution_feature(s, 99, &index, &weight, &gamma) != KLRFS_OK);
  char* text = nullptr;
  REQUIRE(klrfs_solution_json(s, &text) == KLRFS_OK);
  CHECK(Take(text).find("\"selected\"") != std::string::npos);
  klrfs_solution_destroy(s);

  klrfs_report* r = nullptr;
  REQUIRE(klrfs_run(c, d, KLRFS_EXPERIMENT_SWEEP_DELTA, &r) == KLRFS_OK);
  CHECK(klrfs_report_record_count(r) == 4);
  CHECK(klrfs_report_failure_count(r) == 0);
  REQUIRE(klrfs_report_records_csv(r, &text) == KLRFS_OK);
  const std::string csv = Take(text);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  REQUIRE(klrfs_report_summary(r, &text) == KLRFS_OK);
  CHECK(!Take(text).empty());
  klrfs_report_destroy(r);

  CHECK(klrfs_run(c, d, static_cast<klrfs_experiment>(7), &r) == KLRFS_ERR_CONFIG);
  klrfs_config_set(c, "delta_grid", "0,3");
  CHECK(klrfs_run(c, d, KLRFS_EXPERIMENT_SWEEP_DELTA, &r) == KLRFS_ERR_CONFIG);
  klrfs_config_destroy(c);
  klrfs_dataset_destroy(d);
}
