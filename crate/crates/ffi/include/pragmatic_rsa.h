#ifndef PRAGMATIC_RSA_H
#define PRAGMATIC_RSA_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PrsaStatus {
  PRSA_STATUS_OK = 0,
  PRSA_STATUS_NULL_ARGUMENT = 1,
  PRSA_STATUS_INVALID_UTF8 = 2,
  PRSA_STATUS_CONFIG_ERROR = 3,
  PRSA_STATUS_IO_ERROR = 4,
  PRSA_STATUS_PARSE_ERROR = 5,
  PRSA_STATUS_RUNTIME_ERROR = 6,
  PRSA_STATUS_PANIC = 7,
} PrsaStatus;

typedef enum PrsaSpeaker {
  PRSA_SPEAKER_LITERAL = 0,
  PRSA_SPEAKER_RATIONAL = 1,
  PRSA_SPEAKER_PRAGMATIC = 2,
  PRSA_SPEAKER_UPPER_BOUND = 3,
} PrsaSpeaker;

typedef struct PrsaConfig PrsaConfig;

typedef struct PrsaDataset PrsaDataset;

typedef struct PrsaPolicy PrsaPolicy;

typedef struct PrsaTaxonomy PrsaTaxonomy;

/**
 * Accuracy per difficulty slice.
 */
typedef struct PrsaAccuracy {
  double hard;
  double easy;
  double combined;
} PrsaAccuracy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next `prsa_*` call on the same thread.
 */
const char *prsa_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void prsa_string_free(char *s);

/**
 * The built-in object/category taxonomy.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum PrsaStatus prsa_taxonomy_new(struct PrsaTaxonomy **out);

/**
 * # Safety
 * `tax` must be null or a handle from [`prsa_taxonomy_new`], not yet freed.
 */
void prsa_taxonomy_free(struct PrsaTaxonomy *tax);

/**
 * Category of `token` (a category maps to itself). The result must be
 * released with [`prsa_string_free`].
 *
 * # Safety
 * Pointers must be valid; `token` must be NUL-terminated.
 */
enum PrsaStatus prsa_hypernym_of(const struct PrsaTaxonomy *tax, const char *token, char **out);

/**
 * Default experiment configuration.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum PrsaStatus prsa_config_default(struct PrsaConfig **out);

/**
 * Configuration parsed from TOML text; unset fields keep their defaults.
 *
 * # Safety
 * `toml` must be NUL-terminated; `out` must be a valid pointer.
 */
enum PrsaStatus prsa_config_from_toml(const char *toml, struct PrsaConfig **out);

/**
 * # Safety
 * `config` must be null or a live config handle.
 */
void prsa_config_free(struct PrsaConfig *config);

/**
 * Generates the dataset described by `config` (or loads its `dataset` file).
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum PrsaStatus prsa_dataset_generate(const struct PrsaConfig *config,
                                      const struct PrsaTaxonomy *tax,
                                      struct PrsaDataset **out);

/**
 * # Safety
 * Handles must be live; `path` must be NUL-terminated; `out` must be valid.
 */
enum PrsaStatus prsa_dataset_load(const char *path,
                                  const struct PrsaTaxonomy *tax,
                                  struct PrsaDataset **out);

/**
 * # Safety
 * Handles must be live; `path` must be NUL-terminated.
 */
enum PrsaStatus prsa_dataset_save(const struct PrsaDataset *dataset,
                                  const char *path,
                                  const struct PrsaTaxonomy *tax);

/**
 * Split sizes. Any of the output pointers may be null.
 *
 * # Safety
 * `dataset` must be live; non-null outputs must be valid.
 */
enum PrsaStatus prsa_dataset_sizes(const struct PrsaDataset *dataset,
                                   size_t *train,
                                   size_t *val,
                                   size_t *test);

/**
 * # Safety
 * `dataset` must be null or a live dataset handle.
 */
void prsa_dataset_free(struct PrsaDataset *dataset);

/**
 * Trains the disparity layer for repeat `repeat` of `config` against the
 * configured listener and returns the best validation snapshot.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum PrsaStatus prsa_train(const struct PrsaDataset *dataset,
                           const struct PrsaConfig *config,
                           const struct PrsaTaxonomy *tax,
                           uint32_t repeat,
                           struct PrsaPolicy **out);

/**
 * # Safety
 * Handles must be live; `path` must be NUL-terminated.
 */
enum PrsaStatus prsa_policy_save(const struct PrsaPolicy *policy,
                                 const char *path,
                                 const struct PrsaTaxonomy *tax);

/**
 * # Safety
 * Handles must be live; `path` must be NUL-terminated; `out` must be valid.
 */
enum PrsaStatus prsa_policy_load(const char *path,
                                 const struct PrsaTaxonomy *tax,
                                 struct PrsaPolicy **out);

/**
 * Learned preference weight of `token`.
 *
 * # Safety
 * Handles must be live; `token` must be NUL-terminated; `out` must be valid.
 */
enum PrsaStatus prsa_policy_weight(const struct PrsaPolicy *policy,
                                   const char *token,
                                   const struct PrsaTaxonomy *tax,
                                   double *out);

/**
 * # Safety
 * `policy` must be null or a live policy handle.
 */
void prsa_policy_free(struct PrsaPolicy *policy);

/**
 * Plays `speaker` against the configured listener on the test split.
 * `policy` may be null unless `speaker` is `Pragmatic`.
 *
 * # Safety
 * Handles must be live (or null where allowed); `out` must be valid.
 */
enum PrsaStatus prsa_evaluate(enum PrsaSpeaker speaker,
                              const struct PrsaDataset *dataset,
                              const struct PrsaConfig *config,
                              const struct PrsaPolicy *policy,
                              const struct PrsaTaxonomy *tax,
                              uint64_t seed,
                              struct PrsaAccuracy *out);

/**
 * Full run: trains every repeat, evaluates all speakers and writes the
 * reports and checkpoints under `out_dir`. `combined` (nullable) receives
 * the Combined mean accuracy of each speaker in literal, rational,
 * pragmatic, upper-bound order.
 *
 * # Safety
 * Handles must be live; `out_dir` must be NUL-terminated; a non-null
 * `combined` must point to 4 writable doubles.
 */
enum PrsaStatus prsa_run_experiment(const struct PrsaConfig *config,
                                    const struct PrsaTaxonomy *tax,
                                    const char *out_dir,
                                    double *combined);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRAGMATIC_RSA_H */
