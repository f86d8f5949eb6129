#ifndef QORDER_H
#define QORDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QorderCase {
  QORDER_CASE_HALF_FACTORIAL = 0,
  QORDER_CASE_SQUAREFREE = 1,
  QORDER_CASE_NON_SQUAREFREE = 2,
  QORDER_CASE_NON_SQUAREFREE_DYADIC = 3,
} QorderCase;

typedef enum QorderMinDelta {
  QORDER_MIN_DELTA_ONE = 1,
  QORDER_MIN_DELTA_TWO = 2,
  QORDER_MIN_DELTA_UNKNOWN = 0,
} QorderMinDelta;

typedef enum QorderStatus {
  QORDER_STATUS_OK = 0,
  QORDER_STATUS_ARGUMENT = 1,
  QORDER_STATUS_RESOURCE = 2,
  QORDER_STATUS_INVARIANT = 3,
  QORDER_STATUS_DATA = 4,
  QORDER_STATUS_NULL_POINTER = 5,
  QORDER_STATUS_PANIC = 6,
} QorderStatus;

/**
 * Opaque handle to an order `O_f`.
 */
typedef struct QorderOrder QorderOrder;

/**
 * The ideal `p^x (p^y Z + (z + tau) Z)`.
 */
typedef struct QorderTriple {
  int64_t p;
  uint32_t x;
  uint32_t y;
  int64_t z;
} QorderTriple;

typedef struct QorderClassification {
  enum QorderCase case_;
  bool half_factorial;
  /**
   * Largest catenary degree.
   */
  uint32_t catenary;
  /**
   * Largest element of the set of distances, 0 when it is empty.
   */
  uint32_t max_distance;
} QorderClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the order of conductor `f` in `Q(sqrt d)`.
 *
 * # Safety
 * `out` must be valid for writes. The handle is released with
 * `qorder_order_free`.
 */
enum QorderStatus qorder_order_new(int64_t d, int64_t f, struct QorderOrder **out);

/**
 * # Safety
 * `order` must come from `qorder_order_new` and not be freed twice.
 */
void qorder_order_free(struct QorderOrder *order);

/**
 * The closed-form product of two triples.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_star(const struct QorderOrder *order,
                              const struct QorderTriple *a,
                              const struct QorderTriple *b,
                              struct QorderTriple *out);

/**
 * The product computed by lattice multiplication.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_lattice_mul(const struct QorderOrder *order,
                                     const struct QorderTriple *a,
                                     const struct QorderTriple *b,
                                     struct QorderTriple *out);

/**
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_is_invertible(const struct QorderOrder *order,
                                       const struct QorderTriple *t,
                                       bool *out);

/**
 * Number of invertible atoms of norm `p^m`, from the closed form and by
 * enumeration up to the default modulus ceiling.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_atom_count(const struct QorderOrder *order,
                                    int64_t p,
                                    uint32_t m,
                                    int64_t *closed_form,
                                    int64_t *brute_force);

/**
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_classify(const struct QorderOrder *order,
                                  struct QorderClassification *out);

/**
 * The min-delta verdict with `|Pic(O)|` given directly, or unknown when
 * `pic_order <= 0`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_min_delta(const struct QorderOrder *order,
                                   int64_t pic_order,
                                   enum QorderMinDelta *out);

/**
 * Window sweep at `p` as a json document, the same as the `sweep`
 * subcommand prints. Release the string with `qorder_string_free`.
 *
 * # Safety
 * All pointers must be valid.
 */
enum QorderStatus qorder_sweep_json(const struct QorderOrder *order,
                                    int64_t p,
                                    uint32_t bound,
                                    bool invertible_only,
                                    char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void qorder_string_free(char *s);

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *qorder_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QORDER_H */
