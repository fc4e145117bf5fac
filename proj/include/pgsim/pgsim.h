/* C interface to the pgsim library: stick-breaking samplers, exchangeable
 * bridges, random partitions, total-mass Markov chains, closed-form densities
 * and the Monte-Carlo identity harness, behind opaque handles.
 *
 * Conventions: every fallible call returns a pgsim_status and writes results
 * through out-pointers, handles come from the create, sample, build and run
 * calls and are released by the matching destroy (NULL is a safe no-op
 * there), and strings returned through char** are heap copies to release
 * with pgsim_string_free.  On failure out-pointers are left untouched and
 * pgsim_last_error() describes the problem; both the error message and the
 * draws of a handle are local to the calling thread, but distinct handles may
 * live on distinct threads.  All samplers are deterministic functions of the
 * (seed, stream_id) pair of the stream they consume.
 */
#ifndef PGSIM_PGSIM_H
#define PGSIM_PGSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pgsim_status {
    PGSIM_OK = 0,
    PGSIM_ERR_PARAM = 1,   /* malformed input: null handle, bad size, bad code */
    PGSIM_ERR_DOMAIN = 2,  /* parameters outside the law's domain */
    PGSIM_ERR_NUMERIC = 3  /* iteration or allocation failure */
} pgsim_status;

typedef enum pgsim_family {
    PGSIM_FAMILY_PD = 0,  /* two-parameter GEM(alpha, theta); ignores zeta */
    PGSIM_FAMILY_PG = 1,  /* gamma-tilted sticks; needs a zeta spec */
    PGSIM_FAMILY_EPG = 2  /* extended tilted sticks; needs a zeta spec */
} pgsim_family;

typedef enum pgsim_zeta_kind {
    PGSIM_ZETA_ZERO = 0,
    PGSIM_ZETA_CONST = 1, /* value >= 0 */
    PGSIM_ZETA_GAMMA = 2  /* gamma draw with shape value > 0 */
} pgsim_zeta_kind;

typedef enum pgsim_chain_kind {
    PGSIM_CHAIN_V = 0,    /* size-biased remainder chain */
    PGSIM_CHAIN_W = 1,    /* stick chain */
    PGSIM_CHAIN_Q = 2,    /* coagulation chain */
    PGSIM_CHAIN_BDGM = 3  /* bridge-valued coagulation chain */
} pgsim_chain_kind;

typedef enum pgsim_transition_kind {
    PGSIM_TRANSITION_V = 0,
    PGSIM_TRANSITION_W = 1
} pgsim_transition_kind;

typedef struct pgsim_rng pgsim_rng;
typedef struct pgsim_zeta pgsim_zeta;
typedef struct pgsim_mass_partition pgsim_mass_partition;
typedef struct pgsim_bridge pgsim_bridge;
typedef struct pgsim_partition pgsim_partition;
typedef struct pgsim_chain pgsim_chain;

/* Strings owned by the library; never free them.  The error text is valid
 * until the calling thread's next library call. */
const char* pgsim_version(void);
const char* pgsim_last_error(void);  /* empty after a successful call */

void pgsim_string_free(char* text);

/* Stable splittable hash, for deriving stream ids from labels. */
uint64_t pgsim_hash64(const void* data, size_t len);
uint64_t pgsim_hash64_combine(uint64_t a, uint64_t b);

/* Random streams.  Streams with distinct (seed, stream_id) are independent
 * for practical purposes; equal pairs replay the same draws. */
pgsim_status pgsim_rng_create(uint64_t seed, uint64_t stream_id,
                              pgsim_rng** out);
void pgsim_rng_destroy(pgsim_rng* rng);
pgsim_status pgsim_rng_uniform(pgsim_rng* rng, double* out);
pgsim_status pgsim_rng_exponential(pgsim_rng* rng, double* out);
pgsim_status pgsim_rng_normal(pgsim_rng* rng, double* out);
pgsim_status pgsim_rng_gamma(pgsim_rng* rng, double shape, double* out);
pgsim_status pgsim_rng_beta(pgsim_rng* rng, double a, double b, double* out);
pgsim_status pgsim_rng_stable(pgsim_rng* rng, double alpha, double* out);
pgsim_status pgsim_rng_tilted_stable(pgsim_rng* rng, double alpha, double zeta,
                                     double* out);

/* Tilting-variable specs.  value is the constant for PGSIM_ZETA_CONST, the
 * shape for PGSIM_ZETA_GAMMA and ignored for PGSIM_ZETA_ZERO.  The text form
 * is "zero", "const:<value>" or "gamma:<shape>". */
pgsim_status pgsim_zeta_create(pgsim_zeta_kind kind, double value,
                               pgsim_zeta** out);
pgsim_status pgsim_zeta_parse(const char* text, pgsim_zeta** out);
pgsim_status pgsim_zeta_label(const pgsim_zeta* zeta, char** out);
pgsim_status pgsim_zeta_draw(const pgsim_zeta* zeta, pgsim_rng* rng,
                             double* out);
void pgsim_zeta_destroy(pgsim_zeta* zeta);

/* First `count` sticks W_1..W_count of the family, in order.  The k-th
 * size-biased mass is (1 - W_k) * W_1 * ... * W_{k-1}. */
pgsim_status pgsim_sticks_sample(pgsim_family family, double alpha,
                                 double theta, const pgsim_zeta* zeta,
                                 size_t count, pgsim_rng* rng, double* sticks);

/* Ranked masses with residual below trunc left as dust. */
pgsim_status pgsim_mass_partition_sample(pgsim_family family, double alpha,
                                         double theta, const pgsim_zeta* zeta,
                                         double trunc, pgsim_rng* rng,
                                         pgsim_mass_partition** out);
size_t pgsim_mass_partition_size(const pgsim_mass_partition* mp);
pgsim_status pgsim_mass_partition_weight(const pgsim_mass_partition* mp,
                                         size_t index, double* out);
pgsim_status pgsim_mass_partition_dust(const pgsim_mass_partition* mp,
                                       double* out);
pgsim_status pgsim_mass_partition_csv_row(const pgsim_mass_partition* mp,
                                          char** out);
pgsim_status pgsim_mass_partition_json(const pgsim_mass_partition* mp,
                                       char** out);
void pgsim_mass_partition_destroy(pgsim_mass_partition* mp);

/* Exchangeable bridges: F(y) = dust*y + sum of atom weights at locations
 * <= y, with 1 - F(1) the truncation deficit. */
pgsim_status pgsim_bridge_build(pgsim_family family, double alpha,
                                double theta, const pgsim_zeta* zeta,
                                double trunc, pgsim_rng* rng,
                                pgsim_bridge** out);
/* n-fold composition of simple coagulation bridges; total mass exactly 1. */
pgsim_status pgsim_bridge_flow(double alpha, const pgsim_zeta* zeta, size_t n,
                               pgsim_rng* rng, pgsim_bridge** out);
size_t pgsim_bridge_atom_count(const pgsim_bridge* b);
pgsim_status pgsim_bridge_atom(const pgsim_bridge* b, size_t index,
                               double* location, double* weight);
pgsim_status pgsim_bridge_dust(const pgsim_bridge* b, double* out);
pgsim_status pgsim_bridge_total_mass(const pgsim_bridge* b, double* out);
pgsim_status pgsim_bridge_largest_atom(const pgsim_bridge* b, double* out);
pgsim_status pgsim_bridge_eval(const pgsim_bridge* b, double y, double* out);
pgsim_status pgsim_bridge_quantile(const pgsim_bridge* b, double r,
                                   double* out);
/* Weight of the atom a fresh uniform lands on; 0 in dust or deficit. */
pgsim_status pgsim_bridge_first_pick(const pgsim_bridge* b, pgsim_rng* rng,
                                     double* out);
pgsim_status pgsim_bridge_compose(const pgsim_bridge* outer,
                                  const pgsim_bridge* inner,
                                  pgsim_bridge** out);
pgsim_status pgsim_bridge_json(const pgsim_bridge* b, char** out);
void pgsim_bridge_destroy(pgsim_bridge* b);

/* Exchangeable random partition of {1..n} by sequential seating. */
pgsim_status pgsim_partition_sample(pgsim_family family, double alpha,
                                    double theta, const pgsim_zeta* zeta,
                                    int n, pgsim_rng* rng,
                                    pgsim_partition** out);
pgsim_status pgsim_partition_size(const pgsim_partition* p, int* out);
size_t pgsim_partition_block_count(const pgsim_partition* p);
pgsim_status pgsim_partition_block_size(const pgsim_partition* p, size_t block,
                                        size_t* out);
/* Elements are 1-based; blocks ordered by least element, elements increasing. */
pgsim_status pgsim_partition_element(const pgsim_partition* p, size_t block,
                                     size_t index, int* out);
pgsim_status pgsim_partition_rgs_key(const pgsim_partition* p, char** out);
pgsim_status pgsim_partition_json(const pgsim_partition* p, char** out);
pgsim_status pgsim_partition_csv_row(const pgsim_partition* p, char** out);
void pgsim_partition_destroy(pgsim_partition* p);

/* Total-mass chains, states k = 0..steps.  trunc only matters for the
 * bridge-valued kind, where it bounds each bridge's truncation deficit. */
pgsim_status pgsim_chain_run(pgsim_chain_kind kind, double alpha,
                             const pgsim_zeta* zeta, int steps, double trunc,
                             pgsim_rng* rng, pgsim_chain** out);
size_t pgsim_chain_length(const pgsim_chain* chain);
/* Any out-pointer may be NULL.  factor is the step's own multiplier, 0 at
 * k = 0; waiting_time is 0 outside the bridge-valued chain. */
pgsim_status pgsim_chain_state(const pgsim_chain* chain, size_t index, int* k,
                               double* t_hat, double* diversity, double* aux,
                               double* factor, double* waiting_time);
/* "k,t_hat,diversity,factor,waiting_time" header plus one row per state. */
pgsim_status pgsim_chain_csv(const pgsim_chain* chain, char** out);
void pgsim_chain_destroy(pgsim_chain* chain);

/* One-step transition density in s of the chain started at t, 0 < s < t. */
pgsim_status pgsim_transition_density(pgsim_transition_kind kind, double alpha,
                                      double t, double s, double* out);

/* Closed-form densities and moments. */
pgsim_status pgsim_stable_density(double alpha, double x, double* out);
pgsim_status pgsim_delta_density(double alpha, double x, double* out);
pgsim_status pgsim_omega_density(double alpha, double y, double q,
                                 double* out);
pgsim_status pgsim_density_exp_over_tau(double alpha, double zeta, double y,
                                        double* out);
pgsim_status pgsim_survival_exp_over_tau(double alpha, double zeta, double y,
                                         double* out);
pgsim_status pgsim_survival_S(double alpha, double theta, double y,
                              double* out);
pgsim_status pgsim_density_E(double alpha, double theta, double y,
                             double* out);
pgsim_status pgsim_rho_merge_density(double alpha, double theta, double p,
                                     double* out);
/* E[S^{-delta}] for the size-biased total mass S of the (alpha,theta) family. */
pgsim_status pgsim_neg_moment(double alpha, double theta, double delta,
                              double* out);
/* Merge-size law entries j = 0..b; pmf must hold b + 1 doubles. */
pgsim_status pgsim_merge_size_pmf(double alpha, double theta, int b,
                                  double* pmf);

/* Exact partition law of {1..n}, n <= 7, in a fixed enumeration order. */
pgsim_status pgsim_eppf_count(int n, size_t* out);
/* Writes one probability per partition; fails with PGSIM_ERR_PARAM and the
 * required count in *written when capacity is too small. */
pgsim_status pgsim_eppf_oracle(double alpha, double theta, int n,
                               double* probs, size_t capacity,
                               size_t* written);
/* Newline-joined restricted-growth keys in the same enumeration order. */
pgsim_status pgsim_eppf_keys(int n, char** out);

/* Identity registry of the verification harness. */
size_t pgsim_identity_count(void);
const char* pgsim_identity_name(size_t index);  /* NULL past the end */

/* One two-sample Monte-Carlo run of a registered identity.  pass is 1 when
 * the p-value exceeds significance (<= 0 picks the default 0.001).  zeta may
 * be NULL, which means const:1; identities that ignore theta or zeta accept
 * anything there.  Each of statistic, p_value, pass and json may be NULL. */
pgsim_status pgsim_identity_run(const char* id, double alpha, double theta,
                                const pgsim_zeta* zeta, size_t n_samples,
                                uint64_t seed, double significance,
                                double* statistic, double* p_value, int* pass,
                                char** json);

/* Grid sweep over the registry.  NULL arrays fall back to the built-in grid,
 * n_samples 0 to 100000, significance <= 0 to 0.001 and threads 0 to the
 * PGSIM_THREADS environment variable; results do not depend on threads. */
typedef struct pgsim_grid_config {
    const char* const* ids;
    size_t n_ids;
    const double* alphas;
    size_t n_alphas;
    const double* thetas;
    size_t n_thetas;
    const pgsim_zeta* const* zetas;
    size_t n_zetas;
    const uint64_t* seeds;
    size_t n_seeds;
    size_t n_samples;
    double significance;
    int threads;
} pgsim_grid_config;

/* cfg may be NULL for the full default grid.  json gets the report array;
 * total, failures and budget may each be NULL. */
pgsim_status pgsim_identity_grid(const pgsim_grid_config* cfg, char** json,
                                 size_t* total, size_t* failures,
                                 size_t* budget);
/* Tolerated failures for a sweep of the given size: total / 100. */
size_t pgsim_failure_budget(size_t total);

#ifdef __cplusplus
}
#endif

#endif /* PGSIM_PGSIM_H */
