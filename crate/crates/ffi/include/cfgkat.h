#ifndef CFGKAT_H
#define CFGKAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes.
 */
typedef enum CfgkatStatus {
  CFGKAT_STATUS_OK = 0,
  CFGKAT_STATUS_NULL_ARGUMENT = 1,
  CFGKAT_STATUS_INVALID_UTF8 = 2,
  /**
   * The source could not be parsed or lifted.
   */
  CFGKAT_STATUS_FRONTEND = 3,
  /**
   * The lifted program is malformed (for example an undefined label).
   */
  CFGKAT_STATUS_INVALID_PROGRAM = 4,
  CFGKAT_STATUS_TOO_MANY_TESTS = 5,
  /**
   * The report could not be serialized.
   */
  CFGKAT_STATUS_SERIALIZATION = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  CFGKAT_STATUS_INTERNAL = 99,
} CfgkatStatus;

/**
 * A lifted program.
 */
typedef struct CfgkatProgram CfgkatProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `source`, lifts function `function` and stores a new handle in
 * `*out`.
 *
 * `indicator` may be null (detect automatically), empty (no indicator)
 * or a variable name.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be valid
 * for writes.
 */
enum CfgkatStatus cfgkat_program_from_c(const char *source,
                                        const char *function,
                                        const char *indicator,
                                        struct CfgkatProgram **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `program` is null or was returned by this library and not yet freed.
 */
void cfgkat_program_free(struct CfgkatProgram *program);

/**
 * Number of syntax nodes in the program, or 0 for null.
 *
 * # Safety
 * `program` is null or a live handle.
 */
uintptr_t cfgkat_program_size(const struct CfgkatProgram *program);

/**
 * Decides trace equivalence; stores the verdict in `*equivalent`.
 *
 * # Safety
 * `left` and `right` are live handles; `equivalent` is valid for writes.
 */
enum CfgkatStatus cfgkat_equiv(const struct CfgkatProgram *left,
                               const struct CfgkatProgram *right,
                               bool *equivalent);

/**
 * Like [`cfgkat_equiv`], but stores the full report as a JSON string in
 * `*json`. Release it with [`cfgkat_string_free`].
 *
 * # Safety
 * `left` and `right` are live handles; `json` is valid for writes.
 */
enum CfgkatStatus cfgkat_equiv_report_json(const struct CfgkatProgram *left,
                                           const struct CfgkatProgram *right,
                                           char **json);

/**
 * Compares function `function` of two source texts in one call.
 *
 * With `auto_blind`, statements and conditions outside the supported
 * subset are replaced by numbered primitives from a table shared by both
 * sides. The indicator is detected automatically.
 *
 * # Safety
 * String arguments must be NUL-terminated; `equivalent` is valid for
 * writes.
 */
enum CfgkatStatus cfgkat_equiv_sources(const char *left_source,
                                       const char *right_source,
                                       const char *function,
                                       bool auto_blind,
                                       bool *equivalent);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` is null or was returned by this library and not yet freed.
 */
void cfgkat_string_free(char *s);

/**
 * The message of the last failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cfgkat_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CFGKAT_H */
