#ifndef FAIM_H
#define FAIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FaimStatus {
  FAIM_STATUS_OK = 0,
  FAIM_STATUS_NULL_POINTER = 1,
  FAIM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A class is empty in a group that puts weight on balancing it.
   */
  FAIM_STATUS_DEGENERATE_CLASS = 3,
  FAIM_STATUS_UNKNOWN_GROUP = 4,
  FAIM_STATUS_IO = 5,
  /**
   * Malformed model file or input data.
   */
  FAIM_STATUS_FORMAT = 6,
  FAIM_STATUS_PANIC = 7,
} FaimStatus;

/**
 * Records collected before fitting.
 */
typedef struct FaimDataset FaimDataset;

/**
 * A fitted model.
 */
typedef struct FaimModel FaimModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *faim_last_error_message(void);

struct FaimDataset *faim_dataset_new(void);

/**
 * # Safety
 * `dataset` must come from [`faim_dataset_new`] and not be freed; `id` and
 * `group` must be nul-terminated strings.
 */
enum FaimStatus faim_dataset_push(struct FaimDataset *dataset,
                                  const char *id,
                                  const char *group,
                                  double raw_score,
                                  bool positive);

/**
 * # Safety
 * `dataset` must be null or a live handle.
 */
size_t faim_dataset_len(const struct FaimDataset *dataset);

/**
 * # Safety
 * `dataset` must be null or a handle not yet freed.
 */
void faim_dataset_free(struct FaimDataset *dataset);

/**
 * Fit a model. `groups` holds `n_groups` labels and `thetas` holds
 * `3 * n_groups` weights, `(a, b, c)` per label in the same order.
 *
 * # Safety
 * All pointers must be valid for the stated lengths; `out` receives a handle
 * to free with [`faim_model_free`].
 */
enum FaimStatus faim_fit(const struct FaimDataset *dataset,
                         double stepsize,
                         const char *const *groups,
                         const double *thetas,
                         size_t n_groups,
                         struct FaimModel **out);

/**
 * # Safety
 * `model` must be a live handle, `group` a nul-terminated string and `out`
 * writable.
 */
enum FaimStatus faim_apply(const struct FaimModel *model,
                           const char *group,
                           double raw_score,
                           double *out);

/**
 * # Safety
 * `model` must be a live handle and `path` a nul-terminated string.
 */
enum FaimStatus faim_model_save(const struct FaimModel *model, const char *path);

/**
 * # Safety
 * `path` must be a nul-terminated string and `out` writable.
 */
enum FaimStatus faim_model_load(const char *path, struct FaimModel **out);

/**
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void faim_model_free(struct FaimModel *model);

/**
 * Wasserstein-2 distance between two normalized histograms with `bins`
 * equal bins on `[0, 1]`.
 *
 * # Safety
 * `a` and `b` must point to `bins` doubles; `out` must be writable.
 */
enum FaimStatus faim_wasserstein2(const double *a, const double *b, size_t bins, double *out);

/**
 * `(N1 - n1) * n2 - (N2 - n2) * n1`.
 *
 * # Safety
 * `out` must be writable.
 */
enum FaimStatus faim_incompatibility_determinant(uint64_t n1_total,
                                                 uint64_t n1_positive,
                                                 uint64_t n2_total,
                                                 uint64_t n2_positive,
                                                 double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FAIM_H */
