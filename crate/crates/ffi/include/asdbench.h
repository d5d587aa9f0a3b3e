#ifndef ASDBENCH_H
#define ASDBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum AsdStatus {
  ASD_STATUS_OK = 0,
  ASD_STATUS_NULL_POINTER = 1,
  ASD_STATUS_INVALID_UTF8 = 2,
  ASD_STATUS_INVALID_ARGUMENT = 3,
  // Malformed or out-of-range configuration or model document.
  ASD_STATUS_CONFIG = 4,
  // Unreadable, malformed or unusable data.
  ASD_STATUS_DATA = 5,
  // A learner failed to fit or evaluate.
  ASD_STATUS_TRAINING = 6,
  // A Rust panic was caught at the boundary.
  ASD_STATUS_INTERNAL = 7,
} AsdStatus;

// Encoded feature matrix with binary labels.
typedef struct AsdDataset AsdDataset;

// Fitted classifier together with its input standardisation.
typedef struct AsdModel AsdModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *asd_version(void);

// Message of the last failure on this thread, or null when none occurred.
// The pointer stays valid until the next failing call on this thread.
const char *asd_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string obtained from this library that has not
// been freed.
void asd_string_free(char *s);

// Parses ARFF text, drops rows with missing cells and encodes the rest
// with the default exclusions (`result`, `age_desc`). `class_attribute`
// may be null for the default. `dropped` may be null.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum AsdStatus asd_dataset_from_arff(const char *text,
                                     const char *class_attribute,
                                     struct AsdDataset **out,
                                     size_t *dropped);

// Builds a dataset from a row-major `rows x cols` matrix and labels in
// {0, 1}. Feature names are `f0`, `f1`, ….
//
// # Safety
// `features` must hold `rows * cols` values, `labels` `rows` values, and
// `out` must be writable.
enum AsdStatus asd_dataset_from_arrays(const double *features,
                                       size_t rows,
                                       size_t cols,
                                       const uint8_t *labels,
                                       struct AsdDataset **out);

// Row count; 0 for null.
//
// # Safety
// `data` must be null or a live dataset handle.
size_t asd_dataset_rows(const struct AsdDataset *data);

// Feature count; 0 for null.
//
// # Safety
// `data` must be null or a live dataset handle.
size_t asd_dataset_cols(const struct AsdDataset *data);

// Copies the row-major feature matrix into `features` (`rows * cols`
// values) and the labels into `labels` (`rows` values). Either may be null.
//
// # Safety
// `data` must be a live handle and non-null buffers must be large enough.
enum AsdStatus asd_dataset_copy(const struct AsdDataset *data, double *features, uint8_t *labels);

// Seeded holdout split into two new datasets.
//
// # Safety
// `data` must be a live handle; `train` and `test` must be writable.
enum AsdStatus asd_dataset_split(const struct AsdDataset *data,
                                 double train_fraction,
                                 uint64_t seed,
                                 struct AsdDataset **train,
                                 struct AsdDataset **test);

// Releases a dataset. Null is ignored.
//
// # Safety
// `data` must be null or a live handle, not used afterwards.
void asd_dataset_free(struct AsdDataset *data);

// Fits the learner described by `spec_json`, e.g. `{"type":"knn","k":5}`.
// Kernel SVM, kNN, logistic and MLP inputs are standardised internally.
//
// # Safety
// `data` must be a live handle, `spec_json` NUL-terminated and `out`
// writable.
enum AsdStatus asd_model_fit(const struct AsdDataset *data,
                             const char *spec_json,
                             struct AsdModel **out);

// Input width the model expects; 0 for null.
//
// # Safety
// `model` must be null or a live handle.
size_t asd_model_dim(const struct AsdModel *model);

// Predicts `rows` row-major inputs of width `cols`. `labels` and `scores`
// receive `rows` values each; either may be null.
//
// # Safety
// `model` must be a live handle, `features` must hold `rows * cols`
// values and non-null outputs must hold `rows` values.
enum AsdStatus asd_model_predict(const struct AsdModel *model,
                                 const double *features,
                                 size_t rows,
                                 size_t cols,
                                 uint8_t *labels,
                                 double *scores);

// Versioned JSON document of the model. Free with [`asd_string_free`].
//
// # Safety
// `model` must be a live handle and `out` writable.
enum AsdStatus asd_model_to_json(const struct AsdModel *model, char **out);

// Restores a model saved with [`asd_model_to_json`].
//
// # Safety
// `text` must be NUL-terminated and `out` writable.
enum AsdStatus asd_model_from_json(const char *text, struct AsdModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must be null or a live handle, not used afterwards.
void asd_model_free(struct AsdModel *model);

// Area under the ROC curve of `n` scores against labels in {0, 1}.
//
// # Safety
// `scores` and `labels` must hold `n` values; `out` must be writable.
enum AsdStatus asd_auc(const double *scores, const uint8_t *labels, size_t n, double *out);

// Runs an experiment from config JSON. Relative data paths resolve
// against `base_dir` (null for the working directory). When `output_dir`
// is non-null every report file is written there. The report JSON is
// returned in `report_json`, which may be null.
//
// # Safety
// String arguments must be null or NUL-terminated; `report_json` must be
// null or writable.
enum AsdStatus asd_run_experiment(const char *config_json,
                                  const char *base_dir,
                                  const char *output_dir,
                                  char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ASDBENCH_H */
