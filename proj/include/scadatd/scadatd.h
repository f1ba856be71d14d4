/*
 * scadatd: anomaly detection for SCADA-style message streams.
 *
 * The library fits Poisson tensor decompositions to historical traffic and
 * scores new messages with Poisson tail p-values (lower = more anomalous),
 * alongside NMF and PCA baselines, a labeled-attack simulator, and ROC/PR
 * evaluation.
 *
 * All functions that can fail return scadatd_status; on failure,
 * scadatd_last_error() describes the problem for the calling thread. Objects
 * are opaque handles created into out-parameters (written only on success)
 * and released with the matching _free function; _free accepts NULL.
 * Returned const char* pointers stay valid while the handle they came from
 * is alive. Handles are safe to share across threads for read-only use.
 */
#ifndef SCADATD_H
#define SCADATD_H

#include <stddef.h>
#include <stdint.h>

#ifndef SCADATD_API
#if defined(_WIN32)
#define SCADATD_API __declspec(dllimport)
#else
#define SCADATD_API
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scadatd_status {
    SCADATD_OK = 0,
    SCADATD_ERR_INVALID_ARGUMENT = 1, /* bad usage, bad config, contract violation */
    SCADATD_ERR_DATA = 2,             /* malformed or inconsistent input data */
    SCADATD_ERR_NUMERIC = 3,          /* solver or numeric failure */
    SCADATD_ERR_IO = 4,               /* file unreadable or unwritable */
    SCADATD_ERR_INTERNAL = 5
} scadatd_status;

typedef struct scadatd_stream scadatd_stream;     /* parsed message log */
typedef struct scadatd_build scadatd_build;       /* tensor + codebook artifacts */
typedef struct scadatd_detector scadatd_detector; /* trained model bundle */
typedef struct scadatd_scores scadatd_scores;     /* per-message p-values */
typedef struct scadatd_profile scadatd_profile;   /* learned system profile */
typedef struct scadatd_metrics scadatd_metrics;   /* ROC/PR curves and areas */
typedef struct scadatd_sweep scadatd_sweep;       /* rank-selection results */

/* Library version, e.g. "1.0.0". */
SCADATD_API const char* scadatd_version(void);

/* Message for the most recent failure on the calling thread; never NULL. */
SCADATD_API const char* scadatd_last_error(void);

/* Tail probability P(X >= x) for X ~ Poisson(lambda), lambda > 0. */
SCADATD_API scadatd_status scadatd_poisson_tail(int64_t x, double lambda, double* p);

/* Solver controls for the multiplicative-update fits. */
typedef struct scadatd_fit_options {
    size_t max_outer;  /* outer iteration budget */
    size_t max_inner;  /* updates per mode per outer pass */
    double tol;        /* KKT stopping tolerance */
    double kappa;      /* shift applied to inadmissible zeros */
    double kappa_tol;  /* zero threshold for that shift */
    double eps_div;    /* rate floor inside update quotients */
    uint64_t seed;
} scadatd_fit_options;

SCADATD_API void scadatd_fit_options_default(scadatd_fit_options* options);

/* ---- message streams ---------------------------------------------------- */

/* Loads .csv (timestamp_ms,rtu_id,points_requested,channel[,label]) or
 * .jsonl/.ndjson with the same keys. */
SCADATD_API scadatd_status scadatd_stream_load(const char* path, scadatd_stream** out);
SCADATD_API scadatd_status scadatd_stream_save_csv(const scadatd_stream* stream, const char* path);
SCADATD_API scadatd_status scadatd_stream_count(const scadatd_stream* stream, size_t* count);
/* 1 when at least one record carries a label. */
SCADATD_API scadatd_status scadatd_stream_labeled(const scadatd_stream* stream, int* labeled);
SCADATD_API void scadatd_stream_free(scadatd_stream* stream);

/* ---- tensor builds ------------------------------------------------------ */

/* schema: "IPT", "IPCT", or "IPC". target_bins caps the time-bin count for
 * the time-bearing layouts. */
SCADATD_API scadatd_status scadatd_build_create(const scadatd_stream* stream, const char* schema,
                                                size_t target_bins, scadatd_build** out);
/* Writes <dir>/build.json and <dir>/tensor.coo; the directory must exist. */
SCADATD_API scadatd_status scadatd_build_save(const scadatd_build* build, const char* dir);
SCADATD_API scadatd_status scadatd_build_load(const char* dir, scadatd_build** out);
SCADATD_API scadatd_status scadatd_build_info(const scadatd_build* build, size_t* nnz,
                                              size_t* skipped_first_occurrence, size_t* skipped_oov,
                                              long long* inflation_constant);
SCADATD_API void scadatd_build_free(scadatd_build* build);

/* ---- training ----------------------------------------------------------- */

/* Rank-R Poisson CP fit plus the rank-1 smoothing companion. options may be
 * NULL for defaults. */
SCADATD_API scadatd_status scadatd_train_cpapr(const scadatd_build* build, size_t rank,
                                               const scadatd_fit_options* options,
                                               scadatd_detector** out);
/* schema: "IxP" or "IxC". rank 0 picks the layout default (24 or 14). */
SCADATD_API scadatd_status scadatd_train_nmf(const scadatd_stream* stream, const char* schema,
                                             size_t rank, const scadatd_fit_options* options,
                                             scadatd_detector** out);
SCADATD_API scadatd_status scadatd_train_pca(const scadatd_stream* stream, size_t target_bins,
                                             double variance_target, scadatd_detector** out);

SCADATD_API scadatd_status scadatd_detector_save(const scadatd_detector* detector, const char* path);
SCADATD_API scadatd_status scadatd_detector_load(const char* path, scadatd_detector** out);
/* "cpapr", "nmf", or "pca"; pointer valid while the handle lives. */
SCADATD_API const char* scadatd_detector_kind(const scadatd_detector* detector);
/* Layout-qualified tag, e.g. "cpapr-IPC" or "nmf-IxP". */
SCADATD_API const char* scadatd_detector_tag(const scadatd_detector* detector);
/* Rank of the fitted model (component count for PCA). */
SCADATD_API scadatd_status scadatd_detector_rank(const scadatd_detector* detector, size_t* rank);
/* Final KL objective of the rank-R fit (variance captured, for PCA). */
SCADATD_API scadatd_status scadatd_detector_objective(const scadatd_detector* detector, double* value);
SCADATD_API void scadatd_detector_free(scadatd_detector* detector);

/* ---- rank sweep ---------------------------------------------------------- */

/* Fits every rank in ranks[0..n_ranks) on the built tensor, scores the
 * labeled validation stream, and selects the rank with the highest PR AUC
 * (ties go to the smallest rank). n_ranks 0 selects the default grid,
 * 1..50 then 55..100 by 5. */
SCADATD_API scadatd_status scadatd_sweep_run(const scadatd_build* build,
                                             const scadatd_stream* validation, const size_t* ranks,
                                             size_t n_ranks, const scadatd_fit_options* options,
                                             scadatd_sweep** out);
SCADATD_API scadatd_status scadatd_sweep_best_rank(const scadatd_sweep* sweep, size_t* rank);
SCADATD_API scadatd_status scadatd_sweep_size(const scadatd_sweep* sweep, size_t* count);
SCADATD_API scadatd_status scadatd_sweep_entry(const scadatd_sweep* sweep, size_t index, size_t* rank,
                                               double* pr_auc);
SCADATD_API scadatd_status scadatd_sweep_save(const scadatd_sweep* sweep, const char* path);
SCADATD_API void scadatd_sweep_free(scadatd_sweep* sweep);

/* ---- simulation ----------------------------------------------------------- */

SCADATD_API scadatd_status scadatd_profile_learn(const scadatd_stream* stream, scadatd_profile** out);
SCADATD_API scadatd_status scadatd_profile_save(const scadatd_profile* profile, const char* path);
SCADATD_API scadatd_status scadatd_profile_load(const char* path, scadatd_profile** out);
SCADATD_API scadatd_status scadatd_profile_info(const scadatd_profile* profile, size_t* n_rtus,
                                                size_t* n_points_values, size_t* n_channels,
                                                size_t* n_triples);
SCADATD_API void scadatd_profile_free(scadatd_profile* profile);

typedef struct scadatd_scenario {
    const char* name; /* "blackbox", "greybox1", or "greybox2" */
    size_t benign_count;
    size_t anomaly_count;
    int rtu_lo; /* protocol address range, inclusive */
    int rtu_hi;
    int points_lo; /* protocol points range, inclusive */
    int points_hi;
    uint64_t seed;
    int64_t start_ts;
} scadatd_scenario;

/* blackbox over rtu 0..255, points 1..64, seed 0, start_ts 0, zero counts. */
SCADATD_API void scadatd_scenario_default(scadatd_scenario* scenario);

/* Benign-only synthetic traffic drawn from the profile. */
SCADATD_API scadatd_status scadatd_simulate_benign(const scadatd_profile* profile, size_t count,
                                                   uint64_t seed, int64_t start_ts,
                                                   scadatd_stream** out);
/* Benign traffic with exactly anomaly_count labeled anomalies interleaved. */
SCADATD_API scadatd_status scadatd_simulate_scenario(const scadatd_profile* profile,
                                                     const scadatd_scenario* scenario,
                                                     scadatd_stream** out);

/* ---- scoring -------------------------------------------------------------- */

SCADATD_API scadatd_status scadatd_score(const scadatd_detector* detector,
                                         const scadatd_stream* stream, scadatd_scores** out);
SCADATD_API scadatd_status scadatd_scores_count(const scadatd_scores* scores, size_t* count);
/* Records that could not be scored because they were their RTU's first
 * occurrence (time-bearing layouts only). */
SCADATD_API scadatd_status scadatd_scores_skipped(const scadatd_scores* scores,
                                                  size_t* first_occurrence);
SCADATD_API scadatd_status scadatd_scores_labeled(const scadatd_scores* scores, int* labeled);
SCADATD_API scadatd_status scadatd_scores_value(const scadatd_scores* scores, size_t index,
                                                double* p_value, int* oov);
/* model_tag NULL or "" omits the model column (tensor pipeline); baselines
 * pass their tag so merged files stay distinguishable. */
SCADATD_API scadatd_status scadatd_scores_save_csv(const scadatd_scores* scores, const char* path,
                                                   const char* model_tag);
SCADATD_API scadatd_status scadatd_scores_load_csv(const char* path, scadatd_scores** out);
SCADATD_API void scadatd_scores_free(scadatd_scores* scores);

/* ---- evaluation ------------------------------------------------------------ */

/* Requires labeled scores with both classes present. */
SCADATD_API scadatd_status scadatd_evaluate(const scadatd_scores* scores, scadatd_metrics** out);
SCADATD_API scadatd_status scadatd_metrics_values(const scadatd_metrics* metrics, double* roc_auc,
                                                  double* pr_auc, size_t* n_anomalous,
                                                  size_t* n_benign);
/* Writes the metrics document and the ROC / PR curve CSVs. */
SCADATD_API scadatd_status scadatd_metrics_save(const scadatd_metrics* metrics,
                                                const char* metrics_path, const char* roc_csv_path,
                                                const char* pr_csv_path, const char* model_tag);
SCADATD_API void scadatd_metrics_free(scadatd_metrics* metrics);

/* Aggregates n metrics documents into one summary document. */
SCADATD_API scadatd_status scadatd_report_write(const char* const* metrics_paths, size_t n,
                                                const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* SCADATD_H */
