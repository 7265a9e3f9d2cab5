#ifndef COMSR_H
#define COMSR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum ComsrStatus {
  COMSR_OK = 0,
  // A required pointer argument was null.
  COMSR_ERR_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  COMSR_ERR_UTF8 = 2,
  // The SPMF text could not be parsed.
  COMSR_ERR_PARSE = 3,
  // Thresholds, caps or database shape were rejected.
  COMSR_ERR_INVALID = 4,
  COMSR_ERR_IO = 5,
  // An archive or code set was malformed or inconsistent.
  COMSR_ERR_DECODE = 6,
  // An internal consistency check failed.
  COMSR_ERR_INTERNAL = 7,
  // A Rust panic was caught at the boundary.
  COMSR_ERR_PANIC = 8,
} ComsrStatus;

typedef enum ComsrMode {
  // Start from the 1x1 rules that meet the thresholds.
  COMSR_MODE_NON = 0,
  // Start from every 1x1 rule with non-zero support.
  COMSR_MODE_FUL = 1,
} ComsrMode;

typedef enum ComsrCoverPolicy {
  COMSR_COVER_REPEAT = 0,
  COMSR_COVER_SINGLE = 1,
} ComsrCoverPolicy;

typedef enum ComsrPartialCost {
  COMSR_PARTIAL_TWO = 0,
  COMSR_PARTIAL_UNIFORM = 1,
} ComsrPartialCost;

// Opaque sequence database.
typedef struct ComsrDatabase ComsrDatabase;

// Opaque result of a compression run.
typedef struct ComsrRun ComsrRun;

// Parameters of one compression run. Enum fields must hold one of the
// listed constants.
typedef struct ComsrOptions {
  enum ComsrMode mode;
  double minsup;
  double minconf;
  size_t max_antecedent;
  size_t max_consequent;
  enum ComsrCoverPolicy cover;
  enum ComsrPartialCost partial_cost;
} ComsrOptions;

// Headline numbers of a finished run.
typedef struct ComsrRunSummary {
  size_t mined_rule_count;
  size_t candidate_count;
  size_t accepted_count;
  size_t rejected_count;
  size_t initial_rule_count;
  size_t initial_rules_used;
  size_t final_rule_count;
  uint64_t initial_total;
  uint64_t model_length;
  uint64_t data_length;
  uint64_t residual_length;
  uint64_t total_length;
  double compression_ratio;
  double mining_seconds;
  double loop_seconds;
} ComsrRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *comsr_version(void);

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next call into the library on this thread.
const char *comsr_last_error_message(void);

// Parses SPMF text into a new database.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum ComsrStatus comsr_database_parse(const char *text, struct ComsrDatabase **out);

// Reads an SPMF file into a new database.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum ComsrStatus comsr_database_load(const char *path, struct ComsrDatabase **out);

// Releases a database. Null is ignored.
//
// # Safety
// `db` must come from this library and not be used afterwards.
void comsr_database_free(struct ComsrDatabase *db);

// Keeps only the first `limit` sequences.
//
// # Safety
// `db` must be a live handle.
enum ComsrStatus comsr_database_truncate(struct ComsrDatabase *db, size_t limit);

// Sequence count, distinct items and total item occurrences. Any of the
// out-pointers may be null.
//
// # Safety
// `db` must be a live handle; non-null out-pointers must be writable.
enum ComsrStatus comsr_database_counts(const struct ComsrDatabase *db,
                                       size_t *sequences,
                                       size_t *alphabet,
                                       size_t *total_items);

// Writes the database back as normalized SPMF text.
//
// # Safety
// `db` must be a live handle; `out` must be writable.
enum ComsrStatus comsr_database_to_spmf(const struct ComsrDatabase *db, char **out);

// Defaults: non mode, thresholds 0.5/0.5, caps 4x1, repeat cover, partial
// cost two.
struct ComsrOptions comsr_options_default(void);

// Runs the greedy selection. Null `options` means the defaults.
//
// # Safety
// `db` must be a live handle; `options` null or valid; `out` writable.
enum ComsrStatus comsr_compress(const struct ComsrDatabase *db,
                                const struct ComsrOptions *options,
                                struct ComsrRun **out);

// Releases a run. Null is ignored.
//
// # Safety
// `run` must come from this library and not be used afterwards.
void comsr_run_free(struct ComsrRun *run);

// # Safety
// `run` must be a live handle; `out` writable.
enum ComsrStatus comsr_run_summary(const struct ComsrRun *run, struct ComsrRunSummary *out);

// Run report as JSON.
//
// # Safety
// `run` must be a live handle; `out` writable.
enum ComsrStatus comsr_run_report_json(const struct ComsrRun *run, char **out);

// Final code set as JSON, readable by [`comsr_decode_json`].
//
// # Safety
// `run` must be a live handle; `out` writable.
enum ComsrStatus comsr_run_codeset_json(const struct ComsrRun *run, char **out);

// Encoded database as JSON, readable by [`comsr_decode_json`].
//
// # Safety
// `run` must be a live handle; `out` writable.
enum ComsrStatus comsr_run_archive_json(const struct ComsrRun *run, char **out);

// Decodes an archive with its code set into SPMF text.
//
// # Safety
// `archive` and `codeset` must be NUL-terminated strings; `out` writable.
enum ComsrStatus comsr_decode_json(const char *archive, const char *codeset, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void comsr_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMSR_H */
