/* C interface to the PHIBP engine: opaque handles, integer status codes, and a
 * thread-local error message.  Every function returning phibp_status writes its
 * outputs only on PHIBP_OK; on failure phibp_last_error() describes the cause.
 */
#ifndef PHIBP_H
#define PHIBP_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  PHIBP_OK = 0,
  PHIBP_ERR_INVALID_ARGUMENT = 1,
  PHIBP_ERR_IO = 2,
  PHIBP_ERR_RUNTIME = 3
} phibp_status;

typedef struct phibp_counts phibp_counts;  /* species-by-group count matrix */
typedef struct phibp_chains phibp_chains;  /* MCMC output */
typedef struct phibp_draws phibp_draws;    /* posterior abundance draws */

const char* phibp_version(void);
const char* phibp_last_error(void);
void phibp_string_free(char* s);

/* ---- count matrices ---- */
phibp_status phibp_counts_load(const char* path, const char* sample_sizes_path,
                               int keep_zero_columns, phibp_counts** out);
phibp_status phibp_counts_save(const phibp_counts* cm, const char* path);
phibp_status phibp_counts_save_sample_sizes(const phibp_counts* cm, const char* path);
void phibp_counts_free(phibp_counts* cm);
int64_t phibp_counts_num_groups(const phibp_counts* cm);
int64_t phibp_counts_num_species(const phibp_counts* cm);
int64_t phibp_counts_cell(const phibp_counts* cm, int64_t group, int64_t species);
phibp_status phibp_counts_set_sample_size(phibp_counts* cm, int64_t group, double m);

/* ---- forward simulation ----
 * config_json: {"base": {...}, "groups": [{...}], "M": [...]} (see README).
 * latents_json_out (optional) receives the full latent truth; free with
 * phibp_string_free. */
phibp_status phibp_simulate(const char* config_json, uint64_t seed,
                            phibp_counts** counts_out, char** latents_json_out);

/* ---- train/test split ---- */
phibp_status phibp_split(const phibp_counts* cm, const double* m_new, int64_t m_len,
                         uint64_t seed, phibp_counts** train_out,
                         phibp_counts** test_out);

/* ---- MCMC fit ----
 * config_json: {"prior": "gg"|"gamma", "chains", "steps", "burnin", "thin",
 *               "delta", "adapt", "zeta0", "zeta", "threads"} */
phibp_status phibp_fit(const phibp_counts* cm, const char* config_json, uint64_t seed,
                       phibp_chains** out);
phibp_status phibp_chains_save_csv(const phibp_chains* cs, const char* path);
phibp_status phibp_chains_load_csv(const char* path, phibp_chains** out);
phibp_status phibp_chains_diagnostics_json(const phibp_chains* cs, char** json_out);
void phibp_chains_free(phibp_chains* cs);

/* ---- posterior abundance draws ----
 * config_json (may be NULL): {"max_draws": 0, "aug_sweeps": 20, "threads": 0} */
phibp_status phibp_posterior(const phibp_counts* cm, const phibp_chains* cs,
                             const char* config_json, uint64_t seed,
                             phibp_draws** out);
phibp_status phibp_draws_save_csv(const phibp_draws* draws, const phibp_counts* cm,
                                  const char* path);
void phibp_draws_free(phibp_draws* draws);

/* ---- prediction ----
 * Writes one row per (draw, group) of predictive summaries plus an
 * unseen-entropy draw column (empty when no new species arrive). */
phibp_status phibp_predict_csv(const phibp_counts* cm, const phibp_draws* draws,
                               const double* m_new, int64_t m_len, uint64_t seed,
                               const char* draws_csv_path,
                               const char* entropy_csv_path);

/* ---- predictive log-likelihood ----
 * config_json (may be NULL): {"quad_nodes": 64, "aug_sweeps": 20,
 * "max_records": 0, "threads": 0}.  m_new has one entry per group. */
phibp_status phibp_loglik_csv(const phibp_counts* train, const phibp_counts* test,
                              const phibp_chains* cs, const double* m_new,
                              int64_t m_len, const char* config_json, uint64_t seed,
                              const char* out_csv_path);

/* ---- diversity ---- */
phibp_status phibp_diversity_csv(const phibp_draws* draws, const phibp_counts* cm,
                                 const char* alpha_csv_path,
                                 const char* beta_csv_path);

#ifdef __cplusplus
}
#endif

#endif
