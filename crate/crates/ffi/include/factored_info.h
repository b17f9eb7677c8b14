#ifndef FACTORED_INFO_H
#define FACTORED_INFO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Incremented on any incompatible change to the exported functions.
 */
#define FI_ABI_VERSION 1

typedef enum FiStatus {
  FI_STATUS_OK = 0,
  FI_STATUS_NULL_POINTER = 1,
  FI_STATUS_INVALID_UTF8 = 2,
  FI_STATUS_PARSE = 3,
  FI_STATUS_INVALID_INPUT = 4,
  FI_STATUS_MISMATCH = 5,
  FI_STATUS_CAP_EXCEEDED = 6,
  FI_STATUS_EXACT_REQUIRED = 7,
  FI_STATUS_PANIC = 8,
} FiStatus;

/**
 * The SFMI polytopes for one alphabet, pair count and pairing.
 */
typedef struct FiAtlas FiAtlas;

/**
 * A probability distribution over a finite product space.
 */
typedef struct FiDistribution FiDistribution;

/**
 * A family of variable subsets.
 */
typedef struct FiFamily FiFamily;

/**
 * A bijection between the x and y variables of a paired space.
 */
typedef struct FiPairing FiPairing;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns [`FI_ABI_VERSION`].
 */
uint32_t fi_abi_version(void);

/**
 * Message for the last failed call on this thread, or NULL after a
 * successful call. Valid until the next call on this thread.
 */
const char *fi_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fi_string_free(char *s);

/**
 * Parses a distribution document
 * (`{"cardinalities": [...], "entries": [{"state", "prob"}, ...]}`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FiStatus fi_distribution_from_json(const char *json, struct FiDistribution **out);

/**
 * Releases a distribution. NULL is ignored.
 *
 * # Safety
 * `d` must come from this library and not have been freed.
 */
void fi_distribution_free(struct FiDistribution *d);

/**
 * Parses a family document (`{"n": 3, "sets": [[1, 2], [2, 3]]}`, 1-based).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FiStatus fi_family_from_json(const char *json, struct FiFamily **out);

/**
 * Releases a family. NULL is ignored.
 *
 * # Safety
 * `f` must come from this library and not have been freed.
 */
void fi_family_free(struct FiFamily *f);

/**
 * Parses a pairing document (`{"n": 2, "match": [2, 1]}`, 1-based).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum FiStatus fi_pairing_from_json(const char *json, struct FiPairing **out);

/**
 * Releases a pairing. NULL is ignored.
 *
 * # Safety
 * `p` must come from this library and not have been freed.
 */
void fi_pairing_free(struct FiPairing *p);

/**
 * Serializes a distribution in the same document format it is read from.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_distribution_to_json(const struct FiDistribution *d, char **out);

/**
 * Number of variables of the distribution's space.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_distribution_variable_count(const struct FiDistribution *d, size_t *out);

/**
 * The identity pairing on `n` pairs.
 *
 * # Safety
 * `out` must be writable.
 */
enum FiStatus fi_pairing_identity(size_t n, struct FiPairing **out);

/**
 * Shannon entropy in nats.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_entropy(const struct FiDistribution *d, double *out);

/**
 * Multi-information in nats.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_multi_information(const struct FiDistribution *d, double *out);

/**
 * Mutual information between the first and second half of the variables.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_block_mutual_information(const struct FiDistribution *d, double *out);

/**
 * Average multi-information over all pairs of variables.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_fmi(const struct FiDistribution *d, double *out);

/**
 * Average multi-information over the sets of `fam`.
 *
 * # Safety
 * `d` and `fam` must be live handles; `out` must be writable.
 */
enum FiStatus fi_i_lambda(const struct FiDistribution *d, const struct FiFamily *fam, double *out);

/**
 * Average mutual information over the pairs `(x_i, y_partner(i))`.
 *
 * # Safety
 * `d` and `pairing` must be live handles; `out` must be writable.
 */
enum FiStatus fi_sfmi(const struct FiDistribution *d, const struct FiPairing *pairing, double *out);

/**
 * Exact test for maximal multi-information; needs rational weights.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_is_i_maximizer(const struct FiDistribution *d, bool *out);

/**
 * Builds every SFMI polytope for `alphabet`-valued variables on `pairs`
 * pairs. A NULL `pairing` selects the identity.
 *
 * # Safety
 * `pairing` must be NULL or a live handle; `out` must be writable.
 */
enum FiStatus fi_atlas_build(size_t alphabet,
                             size_t pairs,
                             const struct FiPairing *pairing,
                             struct FiAtlas **out);

/**
 * Releases an atlas. NULL is ignored.
 *
 * # Safety
 * `a` must come from this library and not have been freed.
 */
void fi_atlas_free(struct FiAtlas *a);

/**
 * Number of polytopes and total number of code vertices.
 *
 * # Safety
 * `a` must be a live handle; both outputs must be writable.
 */
enum FiStatus fi_atlas_counts(const struct FiAtlas *a, size_t *polytopes, size_t *code_vertices);

/**
 * Full atlas report as JSON, with information values in bits when `bits`.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum FiStatus fi_atlas_to_json(const struct FiAtlas *a, bool bits, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FACTORED_INFO_H */
