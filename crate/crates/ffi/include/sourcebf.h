#ifndef SOURCEBF_H
#define SOURCEBF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum SbfStatus {
  SBF_STATUS_OK = 0,
  // A required pointer argument was NULL.
  SBF_STATUS_NULL_POINTER = 1,
  // An argument was out of range or a string was not valid UTF-8.
  SBF_STATUS_INVALID_ARGUMENT = 2,
  SBF_STATUS_CONFIG = 3,
  SBF_STATUS_DATA = 4,
  SBF_STATUS_NUMERICAL = 5,
  SBF_STATUS_INTERNAL = 6,
  // A Rust panic was caught at the boundary.
  SBF_STATUS_PANIC = 7,
} SbfStatus;

// Which value of evidence to read from a report.
typedef enum SbfForm {
  // Alternative-population parameters fixed at their estimates.
  SBF_FORM_PLUG_IN = 0,
  // Alternative-population parameters integrated over their posterior.
  SBF_FORM_FULL = 1,
} SbfForm;

typedef enum SbfFormat {
  // TOML document.
  SBF_FORMAT_STRUCTURED = 0,
  SBF_FORMAT_TEXT = 1,
} SbfFormat;

// Parsed run configuration.
typedef struct SbfConfig SbfConfig;

// Fragment measurements grouped by source.
typedef struct SbfDataset SbfDataset;

// Both values of evidence with their component densities and provenance.
typedef struct SbfReport SbfReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *sbf_version(void);

// Description of the last failure on this thread, or NULL after a success.
// The pointer stays valid until the next call into the library on this
// thread.
const char *sbf_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void sbf_string_free(char *s);

// Reads a TOML run configuration. Relative paths inside it resolve against
// the file's directory.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum SbfStatus sbf_config_load(const char *path, struct SbfConfig **out);

// Parses configuration text. Relative paths resolve against `base_dir`.
//
// # Safety
// `text` and `base_dir` must be NUL-terminated strings; `out` must be
// writable.
enum SbfStatus sbf_config_parse(const char *text, const char *base_dir, struct SbfConfig **out);

// Replaces the sampler seed.
//
// # Safety
// `config` must be a live handle.
enum SbfStatus sbf_config_set_seed(struct SbfConfig *config, uint64_t seed);

// Replaces the per-chain iteration count and burn-in.
//
// # Safety
// `config` must be a live handle.
enum SbfStatus sbf_config_set_iterations(struct SbfConfig *config,
                                         size_t iterations,
                                         size_t burn_in);

// # Safety
// `config` must be NULL or a live handle.
void sbf_config_free(struct SbfConfig *config);

// Loads `source,fragment,<features...>` CSV; every other column is a feature.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum SbfStatus sbf_dataset_load(const char *path, struct SbfDataset **out);

// Number of sources, fragments and features.
//
// # Safety
// `dataset` must be a live handle; each out-pointer must be NULL or
// writable.
enum SbfStatus sbf_dataset_shape(const struct SbfDataset *dataset,
                                 size_t *sources,
                                 size_t *fragments,
                                 size_t *dim);

// # Safety
// `dataset` must be NULL or a live handle.
void sbf_dataset_free(struct SbfDataset *dataset);

// Runs the scenario of `config` and returns its report. Nothing is written
// to disk.
//
// # Safety
// `config` must be a live handle; `out` must be writable.
enum SbfStatus sbf_evaluate(const struct SbfConfig *config, struct SbfReport **out);

// Natural log of the value of evidence and its Monte Carlo standard error
// (zero contributions come from closed-form parts).
//
// # Safety
// `report` must be a live handle; `log_v` must be writable; `mc_se` may be
// NULL.
enum SbfStatus sbf_report_log_v(const struct SbfReport *report,
                                enum SbfForm form,
                                double *log_v,
                                double *mc_se);

// Log densities behind both values: the numerator and the two denominators.
//
// # Safety
// `report` must be a live handle; each out-pointer must be NULL or
// writable.
enum SbfStatus sbf_report_log_densities(const struct SbfReport *report,
                                        double *numerator,
                                        double *denominator_plugin,
                                        double *denominator_full);

// Renders the report. The string must be released with [`sbf_string_free`].
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum SbfStatus sbf_report_render(const struct SbfReport *report, enum SbfFormat format, char **out);

// # Safety
// `report` must be NULL or a live handle.
void sbf_report_free(struct SbfReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOURCEBF_H */
