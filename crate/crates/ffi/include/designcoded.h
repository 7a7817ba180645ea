#ifndef DESIGNCODED_H
#define DESIGNCODED_H

/* Generated by cbindgen from designcoded-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
enum DccStatus
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  DccOk = 0,
  DccNullArgument = 1,
  DccInvalidParameter = 2,
  DccConstructionFailed = 3,
  DccVerificationFailed = 4,
  DccIoFailed = 5,
  DccPanic = 6,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum DccStatus DccStatus;
#else
typedef int32_t DccStatus;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Straggler modes for `dcc_simulate_mapreduce`.
 */
enum DccStragglerMode
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  DccNoStragglers = 0,
  DccFullStragglers = 1,
  DccPartialStragglers = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum DccStragglerMode DccStragglerMode;
#else
typedef int32_t DccStragglerMode;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * Opaque scheme handle: a binary matrix with its identity-submatrix cover.
 */
typedef struct dcc_scheme dcc_scheme;

/**
 * Scheme dimensions and cover sizes.
 */
typedef struct DccParams {
  /**
   * Number of users / compute nodes (matrix rows).
   */
  uint64_t users;
  /**
   * Subpacketization / file complexity (matrix columns).
   */
  uint64_t subfiles;
  /**
   * Ones per row (uncached subfiles per user).
   */
  uint64_t row_weight;
  /**
   * Cover size S.
   */
  uint64_t cover_size;
  /**
   * Identity submatrix size g (0 when non-uniform).
   */
  uint64_t identity_size;
  /**
   * Computation load r = users minus column weight.
   */
  uint64_t computation_load;
} DccParams;

/**
 * An exact nonnegative ratio.
 */
typedef struct DccRatio {
  uint64_t num;
  uint64_t den;
} DccRatio;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *dcc_last_error(void);

/**
 * Release a scheme handle. Null is a no-op.
 */
void dcc_scheme_free(struct dcc_scheme *scheme);

/**
 * Symmetric BIBD scheme from the projective plane of prime-power order n.
 */
DccStatus dcc_build_bibd_projective(uint64_t n, struct dcc_scheme **out);

/**
 * BIBD scheme from the affine plane of prime-power order n.
 */
DccStatus dcc_build_bibd_affine(uint64_t n, struct dcc_scheme **out);

/**
 * Transversal design scheme TD(k, n) with k in {n, n+1}.
 */
DccStatus dcc_build_transversal(uint64_t k, uint64_t n, struct dcc_scheme **out);

/**
 * 3-(q^2+1, q+1, 1) scheme for prime-power q up to 5.
 */
DccStatus dcc_build_steiner3(uint64_t q, struct dcc_scheme **out);

/**
 * Trivial k-(v,k,1)_q subspace design scheme.
 */
DccStatus dcc_build_subspace(uint64_t q, uint32_t v, uint32_t k, struct dcc_scheme **out);

/**
 * Binomial computing matrix on k nodes with replication r.
 */
DccStatus dcc_build_binomial(uint64_t k, uint64_t r, struct dcc_scheme **out);

/**
 * Load matrix.txt and cover.txt from a scheme directory.
 */
DccStatus dcc_scheme_load(const char *dir, struct dcc_scheme **out);

/**
 * Write matrix.txt and cover.txt into a directory (created if missing).
 */
DccStatus dcc_scheme_save(const struct dcc_scheme *scheme, const char *dir);

/**
 * Scheme dimensions; requires constant column weight for the computation
 * load field.
 */
DccStatus dcc_scheme_params(const struct dcc_scheme *scheme, struct DccParams *out);

/**
 * Re-run the cover verifier and the counting identity.
 */
DccStatus dcc_scheme_verify(const struct dcc_scheme *scheme);

/**
 * Run placement and delivery over a random library and check that every
 * user decodes byte-exactly. On success `rate` carries S/F exactly.
 */
DccStatus dcc_simulate_caching(const struct dcc_scheme *scheme,
                               uint32_t files,
                               uint32_t subfile_len,
                               uint64_t seed,
                               struct DccRatio *rate);

/**
 * Run map/shuffle/reduce with beta functions per node and T-bit values;
 * `straggler_count` nodes (the lowest indices) straggle under the given
 * mode. On success `load` carries the exact measured communication load
 * and the reduce outputs matched the centralized oracle.
 */
DccStatus dcc_simulate_mapreduce(const struct dcc_scheme *scheme,
                                 uint32_t beta,
                                 uint32_t t_bits,
                                 uint64_t seed,
                                 DccStragglerMode mode,
                                 uint32_t straggler_count,
                                 struct DccRatio *load);

/**
 * Gaussian binomial coefficient, exact in 64 bits.
 */
DccStatus dcc_gauss_binom(uint64_t v, uint64_t k, uint64_t q, uint64_t *out);

/**
 * Render a comparison table ("compare-man", "straggler-designs", ...) as a
 * CSV string; free it with `dcc_string_free`.
 */
DccStatus dcc_table_csv(const char *name, char **out);

/**
 * Release a string returned by this library. Null is a no-op.
 */
void dcc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DESIGNCODED_H */
