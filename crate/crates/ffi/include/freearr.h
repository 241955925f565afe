#ifndef FREEARR_H
#define FREEARR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FREEARR_STATUS_OK = 0,
  FREEARR_STATUS_NULL_POINTER = 1,
  FREEARR_STATUS_INVALID_UTF8 = 2,
  FREEARR_STATUS_PARSE = 3,
  FREEARR_STATUS_INVALID_HYPERPLANE = 4,
  FREEARR_STATUS_DIMENSION_MISMATCH = 5,
  FREEARR_STATUS_NOT_MEMBER = 6,
  FREEARR_STATUS_NOT_A_FLAT = 7,
  FREEARR_STATUS_INDEX_OUT_OF_RANGE = 8,
  FREEARR_STATUS_BUFFER_TOO_SMALL = 9,
  FREEARR_STATUS_UNKNOWN_CATALOG_ENTRY = 10,
  FREEARR_STATUS_FAILED = 11,
  FREEARR_STATUS_PANIC = 12,
} FreearrStatus;

typedef enum {
  FREEARR_CLASS_INDUCTIVE = 0,
  FREEARR_CLASS_ADDITIONAL = 1,
  FREEARR_CLASS_DIVISIONAL = 2,
  FREEARR_CLASS_STAIR = 3,
} FreearrClass;

typedef enum {
  FREEARR_VERDICT_MEMBER = 0,
  FREEARR_VERDICT_NON_MEMBER = 1,
  FREEARR_VERDICT_UNDECIDED = 2,
} FreearrVerdict;

/**
 * Opaque arrangement handle.
 */
typedef struct FreearrArrangement FreearrArrangement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *freearr_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void freearr_string_free(char *s);

/**
 * # Safety
 * `h` must be NULL or a handle returned by this library, not yet freed.
 */
void freearr_arrangement_free(FreearrArrangement *h);

/**
 * Parses the plain-text format. With `strict`, repeated hyperplanes are an
 * error.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
FreearrStatus freearr_arrangement_parse(const char *text, bool strict, FreearrArrangement **out);

/**
 * Builds an arrangement from `count` normals stored row-major in `normals`
 * (`count * dim` integers).
 *
 * # Safety
 * `normals` must hold `count * dim` integers; `out` must be writable.
 */
FreearrStatus freearr_arrangement_new(uintptr_t dim,
                                      const int64_t *normals,
                                      uintptr_t count,
                                      FreearrArrangement **out);

/**
 * Copies a built-in arrangement (`A`, `B`, `C`, `D`, `Dpp`, `E7`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
FreearrStatus freearr_catalog_get(const char *name, FreearrArrangement **out);

/**
 * # Safety
 * `h` must be a live handle.
 */
uintptr_t freearr_arrangement_dim(const FreearrArrangement *h);

/**
 * # Safety
 * `h` must be a live handle.
 */
uintptr_t freearr_arrangement_len(const FreearrArrangement *h);

/**
 * Rank of the span of the normals.
 *
 * # Safety
 * `h` must be a live handle.
 */
uintptr_t freearr_arrangement_rank(const FreearrArrangement *h);

/**
 * Canonical normal of hyperplane `index` into `buf` (`dim` entries).
 *
 * # Safety
 * `h` must be a live handle; `buf` must hold `cap` integers; `len` must be
 * writable.
 */
FreearrStatus freearr_arrangement_normal(const FreearrArrangement *h,
                                         uintptr_t index,
                                         int64_t *buf,
                                         uintptr_t cap,
                                         uintptr_t *len);

/**
 * Canonical text form; release with `freearr_string_free`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
FreearrStatus freearr_arrangement_emit(const FreearrArrangement *h, char **out);

/**
 * Coefficients of the characteristic polynomial, constant term first
 * (`dim + 1` entries).
 *
 * # Safety
 * `h` must be a live handle; `buf` must hold `cap` integers; `len` must be
 * writable.
 */
FreearrStatus freearr_char_poly(const FreearrArrangement *h,
                                int64_t *buf,
                                uintptr_t cap,
                                uintptr_t *len);

/**
 * Deletion of hyperplane `index`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
FreearrStatus freearr_delete(const FreearrArrangement *h,
                             uintptr_t index,
                             FreearrArrangement **out);

/**
 * Restriction to the flat cut out by the hyperplanes `indices[0..n]`.
 *
 * # Safety
 * `h` must be a live handle; `indices` must hold `n` entries; `out` must be
 * writable.
 */
FreearrStatus freearr_restrict(const FreearrArrangement *h,
                               const uintptr_t *indices,
                               uintptr_t n,
                               FreearrArrangement **out);

/**
 * Localization at the flat cut out by the hyperplanes `indices[0..n]`.
 *
 * # Safety
 * As for `freearr_restrict`.
 */
FreearrStatus freearr_localize(const FreearrArrangement *h,
                               const uintptr_t *indices,
                               uintptr_t n,
                               FreearrArrangement **out);

/**
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
FreearrStatus freearr_product(const FreearrArrangement *a,
                              const FreearrArrangement *b,
                              FreearrArrangement **out);

/**
 * Index of the hyperplane with normal `normal[0..dim]`, up to scaling.
 *
 * # Safety
 * `h` must be a live handle; `normal` must hold `dim` integers; `out` must
 * be writable.
 */
FreearrStatus freearr_index_of(const FreearrArrangement *h, const int64_t *normal, uintptr_t *out);

/**
 * Decides freeness. `exponents` receives the exponents (`dim` entries) when
 * free; `certificate`, if not NULL, receives the basis certificate or the
 * non-freeness witness as JSON.
 *
 * # Safety
 * `h` must be a live handle; `free` and `len` must be writable; `exponents`
 * must hold `cap` entries; `certificate` must be NULL or writable.
 */
FreearrStatus freearr_is_free(const FreearrArrangement *h,
                              bool *free,
                              uint32_t *exponents,
                              uintptr_t cap,
                              uintptr_t *len,
                              char **certificate);

/**
 * Decides class membership within `budget` search nodes. `artifact`, if
 * not NULL, receives the certificate, refutation trace or budget report as
 * JSON.
 *
 * # Safety
 * `h` must be a live handle; `verdict` must be writable; `artifact` must be
 * NULL or writable.
 */
FreearrStatus freearr_classify(const FreearrArrangement *h,
                               FreearrClass class_,
                               uint64_t budget,
                               FreearrVerdict *verdict,
                               char **artifact);

/**
 * Whether an invertible linear map carries `a` onto `b`; with `lattice`,
 * whether their intersection lattices are isomorphic instead.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
FreearrStatus freearr_isomorphic(const FreearrArrangement *a,
                                 const FreearrArrangement *b,
                                 bool lattice,
                                 bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREEARR_H */
