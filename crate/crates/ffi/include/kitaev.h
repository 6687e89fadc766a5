#ifndef KITAEV_H
#define KITAEV_H

/* Generated by cbindgen from kitaev-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum KvStatus {
  KV_STATUS_OK = 0,
  /**
   * A pointer/encoding argument was null or malformed.
   */
  KV_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Input data failed structural validation.
   */
  KV_STATUS_VALIDATION = 2,
  /**
   * A numeric computation failed or exceeded its tolerance.
   */
  KV_STATUS_NUMERIC = 3,
  /**
   * The requested operation or format is not supported.
   */
  KV_STATUS_UNSUPPORTED = 4,
} KvStatus;

/**
 * An arrow presentation together with its surface complex.
 */
typedef struct KvComplex KvComplex;

/**
 * A model context: complex plus Hopf data and derived structures.
 */
typedef struct KvModel KvModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread; do not free it.
 */
const char *kv_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must have been returned by a `kitaev` function through a
 * `char**` out-parameter and not freed before.
 */
void kv_string_free(char *s);

/**
 * Create a complex from a preset name (`minimal-sphere`, `cube`,
 * `torus-NxM`) or a JSON description.
 *
 * # Safety
 * `spec` must be a valid NUL-terminated string; `out` must be a valid
 * pointer.
 */
enum KvStatus kv_complex_new(const char *spec, struct KvComplex **out);

/**
 * Release a complex handle.
 *
 * # Safety
 * `c` must come from `kv_complex_new` and not be freed twice.
 */
void kv_complex_free(struct KvComplex *c);

/**
 * Number of arrows.
 *
 * # Safety
 * `c` must be a live complex handle.
 */
uintptr_t kv_complex_arrows(const struct KvComplex *c);

/**
 * Cell counts by dimension.
 *
 * # Safety
 * All pointers must be valid; `c` must be a live complex handle.
 */
enum KvStatus kv_complex_counts(const struct KvComplex *c,
                                uintptr_t *vertices,
                                uintptr_t *edges,
                                uintptr_t *faces);

/**
 * Euler characteristic.
 *
 * # Safety
 * `c` must be a live complex handle.
 */
int64_t kv_complex_euler(const struct KvComplex *c);

/**
 * Validate raw complex JSON; writes a report
 * `{"valid": bool, "violations": [...]}`.
 *
 * # Safety
 * `json` must be a valid string, `report` a valid pointer.
 */
enum KvStatus kv_complex_validate_json(const char *json, char **report);

/**
 * Apply a transform (`dual`, `dual-alt`, `mirror`, `double`,
 * `dual-double`) and return a new complex handle.
 *
 * # Safety
 * `c` must be a live handle, `op` a valid string, `out` valid.
 */
enum KvStatus kv_complex_transform(const struct KvComplex *c,
                                   const char *op,
                                   struct KvComplex **out);

/**
 * Serialize the complex to JSON.
 *
 * # Safety
 * `c` must be a live handle, `json` a valid pointer.
 */
enum KvStatus kv_complex_to_json(const struct KvComplex *c, char **json);

/**
 * Export the Schreier coset graph (`dot` or `graphml`).
 *
 * # Safety
 * `c` must be a live handle; `format` a valid string; `doc` valid.
 */
enum KvStatus kv_schreier_export(const struct KvComplex *c, const char *format, char **doc);

/**
 * Classify a coded curve (`{"base_arrow": int, "word": "2+ 0- ..."}`);
 * writes `{"kind": ..., "proper": bool}`.
 *
 * # Safety
 * `c` must be a live handle; `curve_json` a valid string; `report` valid.
 */
enum KvStatus kv_curve_classify(const struct KvComplex *c, const char *curve_json, char **report);

/**
 * Create a model context from a complex and a Hopf preset name or JSON.
 *
 * # Safety
 * `c` must be a live handle; `hopf` a valid string; `out` valid.
 */
enum KvStatus kv_model_new(const struct KvComplex *c, const char *hopf, struct KvModel **out);

/**
 * Release a model handle.
 *
 * # Safety
 * `m` must come from `kv_model_new` and not be freed twice.
 */
void kv_model_free(struct KvModel *m);

/**
 * Dimension of the protected space, via the projector-rank procedure.
 *
 * # Safety
 * `m` must be a live model handle; `dim` a valid pointer.
 */
enum KvStatus kv_vacuum_dim(const struct KvModel *m,
                            uint64_t seed,
                            uintptr_t mem_cap,
                            uintptr_t *dim);

/**
 * Run an identity suite (`relations`, `gauge`, `loops`, `ribbon`);
 * writes the residual report and the maximal residual.
 *
 * # Safety
 * `m` must be a live model handle; `suite` a valid string; out
 * pointers valid.
 */
enum KvStatus kv_verify_suite(const struct KvModel *m,
                              const char *suite,
                              uint64_t seed,
                              double tol,
                              char **report,
                              double *max_residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KITAEV_H */
