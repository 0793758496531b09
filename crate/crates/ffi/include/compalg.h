#ifndef COMPALG_H
#define COMPALG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Which product [`compalg_element_product`] computes.
 */
typedef enum CompalgProduct {
  COMPALG_PRODUCT_ALPHA = 0,
  COMPALG_PRODUCT_SIGMA = 1,
  COMPALG_PRODUCT_BETA_PLUS = 2,
  COMPALG_PRODUCT_BETA_MINUS = 3,
} CompalgProduct;

/*
 Result code of every fallible call.
 */
typedef enum CompalgStatus {
  COMPALG_STATUS_OK = 0,
  COMPALG_STATUS_NULL_POINTER = 1,
  COMPALG_STATUS_INVALID_UTF8 = 2,
  COMPALG_STATUS_PARSE = 3,
  COMPALG_STATUS_CLASS_MISMATCH = 4,
  COMPALG_STATUS_UNSUPPORTED = 5,
  COMPALG_STATUS_NO_SOLUTION = 6,
  COMPALG_STATUS_INSUFFICIENT_RANK = 7,
  COMPALG_STATUS_FAILED = 8,
  COMPALG_STATUS_PANIC = 9,
} CompalgStatus;

/*
 Result of an identity audit.
 */
typedef struct CompalgAudit CompalgAudit;

/*
 A composition class with its value of ħ.
 */
typedef struct CompalgClass CompalgClass;

/*
 An element of a matrix or phase-space representation.
 */
typedef struct CompalgElement CompalgElement;

/*
 Result of the coproduct solver.
 */
typedef struct CompalgSolution CompalgSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The message of the last failed call on this thread, or null. Valid until
 the next failing call on the same thread.
 */
const char *compalg_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a pointer obtained from this library, freed once.
 */
void compalg_string_free(char *s);

/*
 Creates a class from `elliptic`, `parabolic` or `hyperbolic` and ħ given
 as a rational (`"1"`, `"1/2"`) or `"formal"`.

 # Safety
 `name` and `hbar` must be null or NUL-terminated; `out` must be writable.
 */
enum CompalgStatus compalg_class_new(const char *name, const char *hbar, struct CompalgClass **out);

/*
 # Safety
 `class` must be null or a handle from [`compalg_class_new`], freed once.
 */
void compalg_class_free(struct CompalgClass *class_);

/*
 Parses a polynomial or matrix literal under `class`. `dof` is the
 minimum number of degrees of freedom of a polynomial (0 for automatic).

 # Safety
 `class` must be a live handle, `expr` NUL-terminated, `out` writable.
 */
enum CompalgStatus compalg_element_parse(const struct CompalgClass *class_,
                                         const char *expr,
                                         size_t dof,
                                         struct CompalgElement **out);

/*
 # Safety
 `elem` must be null or a handle from this library, freed once.
 */
void compalg_element_free(struct CompalgElement *elem);

/*
 Computes `f ∘ g` for the selected product into a new handle.

 # Safety
 `f` and `g` must be live handles and `out` writable.
 */
enum CompalgStatus compalg_element_product(enum CompalgProduct product,
                                           const struct CompalgElement *f,
                                           const struct CompalgElement *g,
                                           struct CompalgElement **out);

/*
 Writes whether `elem` is exactly zero.

 # Safety
 `elem` must be a live handle and `out` writable.
 */
enum CompalgStatus compalg_element_is_zero(const struct CompalgElement *elem, bool *out);

/*
 Writes whether `a` and `b` are equal.

 # Safety
 `a` and `b` must be live handles and `out` writable.
 */
enum CompalgStatus compalg_element_equal(const struct CompalgElement *a,
                                         const struct CompalgElement *b,
                                         bool *out);

/*
 The printed form of `elem`, or null for a null handle. Free with
 [`compalg_string_free`].

 # Safety
 `elem` must be null or a live handle.
 */
char *compalg_element_to_string(const struct CompalgElement *elem);

/*
 Runs the identity audit on `representation` (`matrix`, `phase`,
 `composite-matrix`, `composite-phase`).

 # Safety
 `class` must be a live handle, `representation` NUL-terminated, `out`
 writable.
 */
enum CompalgStatus compalg_audit_run(const struct CompalgClass *class_,
                                     const char *representation,
                                     size_t samples,
                                     uint64_t seed,
                                     struct CompalgAudit **out);

/*
 Whether every identity held; false for a null handle.

 # Safety
 `audit` must be null or a live handle.
 */
bool compalg_audit_passed(const struct CompalgAudit *audit);

/*
 The report as JSON. Free with [`compalg_string_free`].

 # Safety
 `audit` must be null or a live handle.
 */
char *compalg_audit_to_json(const struct CompalgAudit *audit);

/*
 # Safety
 `audit` must be null or a handle from this library, freed once.
 */
void compalg_audit_free(struct CompalgAudit *audit);

/*
 Recovers the coproduct table for `representation` (`matrix` or `phase`).

 # Safety
 `class` must be a live handle, `representation` NUL-terminated, `out`
 writable.
 */
enum CompalgStatus compalg_solve_coproduct(const struct CompalgClass *class_,
                                           const char *representation,
                                           uint64_t seed,
                                           struct CompalgSolution **out);

/*
 Looks up a solved table entry (`a11` … `b22`). Writes `fixed = false`
 for a free entry; otherwise writes the value as `num/den`.

 # Safety
 `solution` must be a live handle, `name` NUL-terminated, all outputs
 writable.
 */
enum CompalgStatus compalg_solution_entry(const struct CompalgSolution *solution,
                                          const char *name,
                                          bool *fixed,
                                          int64_t *num,
                                          int64_t *den);

/*
 The derivation transcript and solution as JSON. Free with
 [`compalg_string_free`].

 # Safety
 `solution` must be null or a live handle.
 */
char *compalg_solution_to_json(const struct CompalgSolution *solution);

/*
 # Safety
 `solution` must be null or a handle from this library, freed once.
 */
void compalg_solution_free(struct CompalgSolution *solution);

/*
 CHSH value of the singlet at angles `a, a', b, b'` (radians).

 # Safety
 `angles` must point to four doubles and `out` be writable.
 */
enum CompalgStatus compalg_chsh_quantum(const double *angles, double *out);

/*
 Best CHSH value over deterministic local strategies.
 */
double compalg_chsh_classical_max(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* COMPALG_H */
