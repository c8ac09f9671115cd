/* C interface to the klrfs feature-selection library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a klrfs_status; on failure a description of
 * the last error on the calling thread is available from
 * klrfs_last_error(). Strings returned through `char**` out-parameters are
 * owned by the caller and released with klrfs_string_free().
 */
#ifndef KLRFS_KLRFS_H_
#define KLRFS_KLRFS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(KLRFS_BUILDING_LIBRARY)
#define KLRFS_API __declspec(dllexport)
#else
#define KLRFS_API __declspec(dllimport)
#endif
#else
#define KLRFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status values double as CLI exit codes. */
typedef enum klrfs_status {
  KLRFS_OK = 0,
  KLRFS_ERR_DATA = 1,      /* unreadable or malformed input data */
  KLRFS_ERR_CONFIG = 2,    /* bad configuration key, value or argument */
  KLRFS_ERR_NUMERICAL = 3, /* degenerate problem or solver failure */
  KLRFS_ERR_INTERNAL = 4   /* null handle, allocation failure, bug */
} klrfs_status;

typedef enum klrfs_experiment {
  KLRFS_EXPERIMENT_EVALUATE = 0,    /* KLR-FS at one delta over repeated splits */
  KLRFS_EXPERIMENT_SWEEP_DELTA = 1, /* KLR-FS over the delta grid */
  KLRFS_EXPERIMENT_BENCHMARK = 2    /* KLR-FS and baselines on identical splits */
} klrfs_experiment;

typedef struct klrfs_config klrfs_config;
typedef struct klrfs_dataset klrfs_dataset;
typedef struct klrfs_solution klrfs_solution;
typedef struct klrfs_report klrfs_report;

KLRFS_API const char* klrfs_version(void);
KLRFS_API const char* klrfs_last_error(void);
KLRFS_API void klrfs_string_free(char* s);

/* Configuration ---------------------------------------------------------- */

KLRFS_API klrfs_status klrfs_config_create(klrfs_config** out);
KLRFS_API void klrfs_config_destroy(klrfs_config* config);
/* Reads a `key = value` file on top of the current values. */
KLRFS_API klrfs_status klrfs_config_load(klrfs_config* config, const char* path);
KLRFS_API klrfs_status klrfs_config_set(klrfs_config* config, const char* key, const char* value);
KLRFS_API klrfs_status klrfs_config_get(const klrfs_config* config, const char* key, char** value);
KLRFS_API klrfs_status klrfs_config_validate(const klrfs_config* config);
/* Schema enumeration: name, type, default value and help text of key i. */
KLRFS_API size_t klrfs_config_key_count(void);
KLRFS_API klrfs_status klrfs_config_key_info(size_t index, const char** name, const char** type,
                                             const char** default_value, const char** help);

/* Datasets --------------------------------------------------------------- */

/* Loads a CSV using the label_column / positive_class / id_column keys. */
KLRFS_API klrfs_status klrfs_dataset_load(const klrfs_config* config, const char* path, klrfs_dataset** out);
KLRFS_API klrfs_status klrfs_dataset_synthesize(int64_t samples, int64_t features, int64_t informative,
                                                double shift, uint64_t seed, klrfs_dataset** out);
KLRFS_API void klrfs_dataset_destroy(klrfs_dataset* dataset);
KLRFS_API int64_t klrfs_dataset_samples(const klrfs_dataset* dataset);
KLRFS_API int64_t klrfs_dataset_features(const klrfs_dataset* dataset);
KLRFS_API klrfs_status klrfs_dataset_class_counts(const klrfs_dataset* dataset, int64_t* positive,
                                                  int64_t* negative);
/* Raw access: values row-major (samples x features), labels as +1/-1. */
KLRFS_API klrfs_status klrfs_dataset_copy_values(const klrfs_dataset* dataset, double* out, size_t count);
KLRFS_API klrfs_status klrfs_dataset_copy_labels(const klrfs_dataset* dataset, int* out, size_t count);
KLRFS_API klrfs_status klrfs_dataset_save_csv(const klrfs_dataset* dataset, const char* path,
                                              const char* label_column);
/* JSON summary: shape, class counts, constant features and, for synthetic
 * data, the planted informative feature indices. */
KLRFS_API klrfs_status klrfs_dataset_summary_json(const klrfs_dataset* dataset, char** json);

/* Selection -------------------------------------------------------------- */

/* KLR-FS on the whole dataset at config `delta` with p = max(p_select). */
KLRFS_API klrfs_status klrfs_select(const klrfs_config* config, const klrfs_dataset* dataset,
                                    klrfs_solution** out);
KLRFS_API void klrfs_solution_destroy(klrfs_solution* solution);
KLRFS_API size_t klrfs_solution_size(const klrfs_solution* solution);
KLRFS_API klrfs_status klrfs_solution_feature(const klrfs_solution* solution, size_t rank, int64_t* index,
                                              double* weight, double* gamma);
KLRFS_API klrfs_status klrfs_solution_json(const klrfs_solution* solution, char** json);
KLRFS_API klrfs_status klrfs_solution_feature_list(const klrfs_solution* solution, char** text);
KLRFS_API klrfs_status klrfs_solution_summary(const klrfs_solution* solution, char** text);

/* Experiments ------------------------------------------------------------ */

KLRFS_API klrfs_status klrfs_run(const klrfs_config* config, const klrfs_dataset* dataset,
                                 klrfs_experiment experiment, klrfs_report** out);
KLRFS_API void klrfs_report_destroy(klrfs_report* report);
KLRFS_API size_t klrfs_report_record_count(const klrfs_report* report);
KLRFS_API size_t klrfs_report_failure_count(const klrfs_report* report);
KLRFS_API klrfs_status klrfs_report_json(const klrfs_report* report, char** json);
/* method,p,delta,repeat,auc,red */
KLRFS_API klrfs_status klrfs_report_records_csv(const klrfs_report* report, char** csv);
KLRFS_API klrfs_status klrfs_report_aggregates_csv(const klrfs_report* report, char** csv);
KLRFS_API klrfs_status klrfs_report_summary(const klrfs_report* report, char** text);

#ifdef __cplusplus
}
#endif

#endif /* KLRFS_KLRFS_H_ */
