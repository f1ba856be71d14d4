// C ABI wrapper over the C++ core. Every entry point catches exceptions at
// the boundary, records the message in thread-local storage, and returns a
// status code; handles own plain C++ objects.

#define SCADATD_API __attribute__((visibility("default")))

#include <scadatd/scadatd.h>

#include <exception>
#include <new>
#include <string>

#include "../core/detector.hpp"
#include "../core/error.hpp"
#include "../core/evaluate.hpp"
#include "../core/ingest.hpp"
#include "../core/persist.hpp"
#include "../core/poisson.hpp"
#include "../core/scoring.hpp"
#include "../core/simulator.hpp"
#include "../core/train.hpp"

struct scadatd_stream {
    scadatd::MessageStream records;
};
struct scadatd_build {
    scadatd::TensorBuild build;
};
struct scadatd_detector {
    scadatd::Detector detector;
    std::string kind;
    std::string tag;
};
struct scadatd_scores {
    scadatd::ScoreBatch batch;
};
struct scadatd_profile {
    scadatd::SystemProfile profile;
};
struct scadatd_metrics {
    scadatd::EvaluationReport report;
};
struct scadatd_sweep {
    scadatd::SweepResult sweep;
};

namespace {

thread_local std::string g_last_error = "no error";

scadatd_status status_of(scadatd::ErrorCode code) {
    switch (code) {
        case scadatd::ErrorCode::invalid_argument: return SCADATD_ERR_INVALID_ARGUMENT;
        case scadatd::ErrorCode::data: return SCADATD_ERR_DATA;
        case scadatd::ErrorCode::numeric: return SCADATD_ERR_NUMERIC;
        case scadatd::ErrorCode::io: return SCADATD_ERR_IO;
    }
    return SCADATD_ERR_INTERNAL;
}

scadatd_status fail(scadatd_status s, const char* message) {
    g_last_error = message;
    return s;
}

// Runs the body, mapping exceptions to status codes.
template <typename Fn>
scadatd_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const scadatd::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return SCADATD_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return SCADATD_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return SCADATD_ERR_INTERNAL;
    }
}

scadatd::FitOptions to_fit_options(const scadatd_fit_options* o) {
    if (!o) return {};
    scadatd::FitOptions f;
    f.max_outer = o->max_outer;
    f.max_inner = o->max_inner;
    f.tol = o->tol;
    f.kappa = o->kappa;
    f.kappa_tol = o->kappa_tol;
    f.eps_div = o->eps_div;
    f.seed = o->seed;
    return f;
}

scadatd_detector* wrap_detector(scadatd::Detector d) {
    auto* h = new scadatd_detector{std::move(d), {}, {}};
    h->kind = scadatd::detector_kind(h->detector);
    h->tag = scadatd::detector_tag(h->detector);
    return h;
}

bool stream_is_labeled(const scadatd::MessageStream& records) {
    for (const auto& r : records)
        if (r.label) return true;
    return false;
}

} // namespace

extern "C" {

const char* scadatd_version(void) { return "1.0.0"; }

const char* scadatd_last_error(void) { return g_last_error.c_str(); }

scadatd_status scadatd_poisson_tail(int64_t x, double lambda, double* p) {
    if (!p) return fail(SCADATD_ERR_INVALID_ARGUMENT, "poisson_tail: p is NULL");
    return guarded([&] {
        *p = scadatd::poisson_tail(x, lambda);
        return SCADATD_OK;
    });
}

void scadatd_fit_options_default(scadatd_fit_options* options) {
    if (!options) return;
    scadatd::FitOptions d;
    options->max_outer = d.max_outer;
    options->max_inner = d.max_inner;
    options->tol = d.tol;
    options->kappa = d.kappa;
    options->kappa_tol = d.kappa_tol;
    options->eps_div = d.eps_div;
    options->seed = d.seed;
}

/* ---- streams ---- */

scadatd_status scadatd_stream_load(const char* path, scadatd_stream** out) {
    if (!path || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "stream_load: NULL argument");
    return guarded([&] {
        auto records = scadatd::load_messages(path);
        *out = new scadatd_stream{std::move(records)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_stream_save_csv(const scadatd_stream* stream, const char* path) {
    if (!stream || !path) return fail(SCADATD_ERR_INVALID_ARGUMENT, "stream_save_csv: NULL argument");
    return guarded([&] {
        scadatd::save_messages_csv(stream->records, path);
        return SCADATD_OK;
    });
}

scadatd_status scadatd_stream_count(const scadatd_stream* stream, size_t* count) {
    if (!stream || !count) return fail(SCADATD_ERR_INVALID_ARGUMENT, "stream_count: NULL argument");
    *count = stream->records.size();
    return SCADATD_OK;
}

scadatd_status scadatd_stream_labeled(const scadatd_stream* stream, int* labeled) {
    if (!stream || !labeled) return fail(SCADATD_ERR_INVALID_ARGUMENT, "stream_labeled: NULL argument");
    *labeled = stream_is_labeled(stream->records) ? 1 : 0;
    return SCADATD_OK;
}

void scadatd_stream_free(scadatd_stream* stream) { delete stream; }

/* ---- builds ---- */

scadatd_status scadatd_build_create(const scadatd_stream* stream, const char* schema,
                                    size_t target_bins, scadatd_build** out) {
    if (!stream || !schema || !out)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "build_create: NULL argument");
    return guarded([&] {
        auto build = scadatd::build_tensor(stream->records, scadatd::schema_from_name(schema),
                                           target_bins);
        *out = new scadatd_build{std::move(build)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_build_save(const scadatd_build* build, const char* dir) {
    if (!build || !dir) return fail(SCADATD_ERR_INVALID_ARGUMENT, "build_save: NULL argument");
    return guarded([&] {
        scadatd::save_build(build->build, dir);
        return SCADATD_OK;
    });
}

scadatd_status scadatd_build_load(const char* dir, scadatd_build** out) {
    if (!dir || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "build_load: NULL argument");
    return guarded([&] {
        *out = new scadatd_build{scadatd::load_build(dir)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_build_info(const scadatd_build* build, size_t* nnz,
                                  size_t* skipped_first_occurrence, size_t* skipped_oov,
                                  long long* inflation_constant) {
    if (!build) return fail(SCADATD_ERR_INVALID_ARGUMENT, "build_info: NULL build");
    if (nnz) *nnz = build->build.tensor.nnz();
    if (skipped_first_occurrence) *skipped_first_occurrence = build->build.skips.first_occurrence;
    if (skipped_oov) *skipped_oov = build->build.skips.oov;
    if (inflation_constant) *inflation_constant = build->build.inflation_constant;
    return SCADATD_OK;
}

void scadatd_build_free(scadatd_build* build) { delete build; }

/* ---- training ---- */

scadatd_status scadatd_train_cpapr(const scadatd_build* build, size_t rank,
                                   const scadatd_fit_options* options, scadatd_detector** out) {
    if (!build || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "train_cpapr: NULL argument");
    return guarded([&] {
        *out = wrap_detector(scadatd::train_cpapr(build->build, rank, to_fit_options(options)));
        return SCADATD_OK;
    });
}

scadatd_status scadatd_train_nmf(const scadatd_stream* stream, const char* schema, size_t rank,
                                 const scadatd_fit_options* options, scadatd_detector** out) {
    if (!stream || !schema || !out)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "train_nmf: NULL argument");
    return guarded([&] {
        const auto layout = scadatd::matrix_schema_from_name(schema);
        const std::size_t k = rank == 0 ? scadatd::nmf_default_rank(layout) : rank;
        *out = wrap_detector(scadatd::train_nmf(stream->records, layout, k, to_fit_options(options)));
        return SCADATD_OK;
    });
}

scadatd_status scadatd_train_pca(const scadatd_stream* stream, size_t target_bins,
                                 double variance_target, scadatd_detector** out) {
    if (!stream || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "train_pca: NULL argument");
    return guarded([&] {
        *out = wrap_detector(scadatd::train_pca(stream->records, target_bins, variance_target));
        return SCADATD_OK;
    });
}

scadatd_status scadatd_detector_save(const scadatd_detector* detector, const char* path) {
    if (!detector || !path) return fail(SCADATD_ERR_INVALID_ARGUMENT, "detector_save: NULL argument");
    return guarded([&] {
        scadatd::save_detector(detector->detector, path);
        return SCADATD_OK;
    });
}

scadatd_status scadatd_detector_load(const char* path, scadatd_detector** out) {
    if (!path || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "detector_load: NULL argument");
    return guarded([&] {
        *out = wrap_detector(scadatd::load_detector(path));
        return SCADATD_OK;
    });
}

const char* scadatd_detector_kind(const scadatd_detector* detector) {
    return detector ? detector->kind.c_str() : "";
}

const char* scadatd_detector_tag(const scadatd_detector* detector) {
    return detector ? detector->tag.c_str() : "";
}

scadatd_status scadatd_detector_rank(const scadatd_detector* detector, size_t* rank) {
    if (!detector || !rank) return fail(SCADATD_ERR_INVALID_ARGUMENT, "detector_rank: NULL argument");
    *rank = scadatd::detector_rank(detector->detector);
    return SCADATD_OK;
}

scadatd_status scadatd_detector_objective(const scadatd_detector* detector, double* value) {
    if (!detector || !value)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "detector_objective: NULL argument");
    *value = scadatd::detector_objective(detector->detector);
    return SCADATD_OK;
}

void scadatd_detector_free(scadatd_detector* detector) { delete detector; }

/* ---- sweep ---- */

scadatd_status scadatd_sweep_run(const scadatd_build* build, const scadatd_stream* validation,
                                 const size_t* ranks, size_t n_ranks,
                                 const scadatd_fit_options* options, scadatd_sweep** out) {
    if (!build || !validation || !out)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_run: NULL argument");
    if (n_ranks > 0 && !ranks)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_run: ranks is NULL with n_ranks > 0");
    return guarded([&] {
        std::vector<std::size_t> grid;
        if (n_ranks == 0) grid = scadatd::default_rank_grid();
        else grid.assign(ranks, ranks + n_ranks);
        auto sweep = scadatd::rank_sweep(build->build.tensor, build->build.codebook,
                                         validation->records, grid, to_fit_options(options));
        *out = new scadatd_sweep{std::move(sweep)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_sweep_best_rank(const scadatd_sweep* sweep, size_t* rank) {
    if (!sweep || !rank) return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_best_rank: NULL argument");
    *rank = sweep->sweep.best_rank;
    return SCADATD_OK;
}

scadatd_status scadatd_sweep_size(const scadatd_sweep* sweep, size_t* count) {
    if (!sweep || !count) return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_size: NULL argument");
    *count = sweep->sweep.pr_aucs.size();
    return SCADATD_OK;
}

scadatd_status scadatd_sweep_entry(const scadatd_sweep* sweep, size_t index, size_t* rank,
                                   double* pr_auc) {
    if (!sweep) return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_entry: NULL sweep");
    if (index >= sweep->sweep.pr_aucs.size())
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_entry: index out of range");
    if (rank) *rank = sweep->sweep.pr_aucs[index].first;
    if (pr_auc) *pr_auc = sweep->sweep.pr_aucs[index].second;
    return SCADATD_OK;
}

scadatd_status scadatd_sweep_save(const scadatd_sweep* sweep, const char* path) {
    if (!sweep || !path) return fail(SCADATD_ERR_INVALID_ARGUMENT, "sweep_save: NULL argument");
    return guarded([&] {
        scadatd::save_sweep(sweep->sweep, path);
        return SCADATD_OK;
    });
}

void scadatd_sweep_free(scadatd_sweep* sweep) { delete sweep; }

/* ---- simulation ---- */

scadatd_status scadatd_profile_learn(const scadatd_stream* stream, scadatd_profile** out) {
    if (!stream || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "profile_learn: NULL argument");
    return guarded([&] {
        *out = new scadatd_profile{scadatd::learn_profile(stream->records)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_profile_save(const scadatd_profile* profile, const char* path) {
    if (!profile || !path) return fail(SCADATD_ERR_INVALID_ARGUMENT, "profile_save: NULL argument");
    return guarded([&] {
        scadatd::save_profile(profile->profile, path);
        return SCADATD_OK;
    });
}

scadatd_status scadatd_profile_load(const char* path, scadatd_profile** out) {
    if (!path || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "profile_load: NULL argument");
    return guarded([&] {
        *out = new scadatd_profile{scadatd::load_profile(path)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_profile_info(const scadatd_profile* profile, size_t* n_rtus,
                                    size_t* n_points_values, size_t* n_channels, size_t* n_triples) {
    if (!profile) return fail(SCADATD_ERR_INVALID_ARGUMENT, "profile_info: NULL profile");
    if (n_rtus) *n_rtus = profile->profile.rtus.size();
    if (n_points_values) *n_points_values = profile->profile.points_values.size();
    if (n_channels) *n_channels = profile->profile.channels.size();
    if (n_triples) *n_triples = profile->profile.triples.size();
    return SCADATD_OK;
}

void scadatd_profile_free(scadatd_profile* profile) { delete profile; }

void scadatd_scenario_default(scadatd_scenario* scenario) {
    if (!scenario) return;
    scadatd::ScenarioConfig d;
    scenario->name = "blackbox";
    scenario->benign_count = 0;
    scenario->anomaly_count = 0;
    scenario->rtu_lo = d.rtu_lo;
    scenario->rtu_hi = d.rtu_hi;
    scenario->points_lo = d.points_lo;
    scenario->points_hi = d.points_hi;
    scenario->seed = 0;
    scenario->start_ts = 0;
}

scadatd_status scadatd_simulate_benign(const scadatd_profile* profile, size_t count, uint64_t seed,
                                       int64_t start_ts, scadatd_stream** out) {
    if (!profile || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "simulate_benign: NULL argument");
    return guarded([&] {
        *out = new scadatd_stream{scadatd::generate_benign(profile->profile, count, seed, start_ts)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_simulate_scenario(const scadatd_profile* profile,
                                         const scadatd_scenario* scenario, scadatd_stream** out) {
    if (!profile || !scenario || !scenario->name || !out)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "simulate_scenario: NULL argument");
    return guarded([&] {
        scadatd::ScenarioConfig c;
        c.scenario = scadatd::scenario_from_name(scenario->name);
        c.benign_count = scenario->benign_count;
        c.anomaly_count = scenario->anomaly_count;
        c.rtu_lo = scenario->rtu_lo;
        c.rtu_hi = scenario->rtu_hi;
        c.points_lo = scenario->points_lo;
        c.points_hi = scenario->points_hi;
        c.seed = scenario->seed;
        *out = new scadatd_stream{
            scadatd::simulate_scenario(profile->profile, c, scenario->start_ts)};
        return SCADATD_OK;
    });
}

/* ---- scoring ---- */

scadatd_status scadatd_score(const scadatd_detector* detector, const scadatd_stream* stream,
                             scadatd_scores** out) {
    if (!detector || !stream || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "score: NULL argument");
    return guarded([&] {
        *out = new scadatd_scores{scadatd::score_stream(detector->detector, stream->records)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_scores_count(const scadatd_scores* scores, size_t* count) {
    if (!scores || !count) return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_count: NULL argument");
    *count = scores->batch.scored.size();
    return SCADATD_OK;
}

scadatd_status scadatd_scores_skipped(const scadatd_scores* scores, size_t* first_occurrence) {
    if (!scores || !first_occurrence)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_skipped: NULL argument");
    *first_occurrence = scores->batch.skips.first_occurrence;
    return SCADATD_OK;
}

scadatd_status scadatd_scores_labeled(const scadatd_scores* scores, int* labeled) {
    if (!scores || !labeled) return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_labeled: NULL argument");
    *labeled = 0;
    for (const auto& s : scores->batch.scored)
        if (s.record.label) {
            *labeled = 1;
            break;
        }
    return SCADATD_OK;
}

scadatd_status scadatd_scores_value(const scadatd_scores* scores, size_t index, double* p_value,
                                    int* oov) {
    if (!scores) return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_value: NULL scores");
    if (index >= scores->batch.scored.size())
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_value: index out of range");
    if (p_value) *p_value = scores->batch.scored[index].p_value;
    if (oov) *oov = scores->batch.scored[index].oov ? 1 : 0;
    return SCADATD_OK;
}

scadatd_status scadatd_scores_save_csv(const scadatd_scores* scores, const char* path,
                                       const char* model_tag) {
    if (!scores || !path) return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_save_csv: NULL argument");
    return guarded([&] {
        scadatd::save_scores_csv(scores->batch, path, model_tag ? model_tag : "");
        return SCADATD_OK;
    });
}

scadatd_status scadatd_scores_load_csv(const char* path, scadatd_scores** out) {
    if (!path || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "scores_load_csv: NULL argument");
    return guarded([&] {
        *out = new scadatd_scores{scadatd::load_scores_csv(path)};
        return SCADATD_OK;
    });
}

void scadatd_scores_free(scadatd_scores* scores) { delete scores; }

/* ---- evaluation ---- */

scadatd_status scadatd_evaluate(const scadatd_scores* scores, scadatd_metrics** out) {
    if (!scores || !out) return fail(SCADATD_ERR_INVALID_ARGUMENT, "evaluate: NULL argument");
    return guarded([&] {
        *out = new scadatd_metrics{scadatd::roc_pr_from_scores(scores->batch.scored)};
        return SCADATD_OK;
    });
}

scadatd_status scadatd_metrics_values(const scadatd_metrics* metrics, double* roc_auc, double* pr_auc,
                                      size_t* n_anomalous, size_t* n_benign) {
    if (!metrics) return fail(SCADATD_ERR_INVALID_ARGUMENT, "metrics_values: NULL metrics");
    if (roc_auc) *roc_auc = metrics->report.roc_auc;
    if (pr_auc) *pr_auc = metrics->report.pr_auc;
    if (n_anomalous) *n_anomalous = metrics->report.n_anomalous;
    if (n_benign) *n_benign = metrics->report.n_benign;
    return SCADATD_OK;
}

scadatd_status scadatd_metrics_save(const scadatd_metrics* metrics, const char* metrics_path,
                                    const char* roc_csv_path, const char* pr_csv_path,
                                    const char* model_tag) {
    if (!metrics || !metrics_path || !roc_csv_path || !pr_csv_path)
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "metrics_save: NULL argument");
    return guarded([&] {
        scadatd::save_metrics(metrics->report, metrics_path, roc_csv_path, pr_csv_path,
                              model_tag ? model_tag : "");
        return SCADATD_OK;
    });
}

void scadatd_metrics_free(scadatd_metrics* metrics) { delete metrics; }

scadatd_status scadatd_report_write(const char* const* metrics_paths, size_t n, const char* out_path) {
    if (!out_path || (n > 0 && !metrics_paths))
        return fail(SCADATD_ERR_INVALID_ARGUMENT, "report_write: NULL argument");
    return guarded([&] {
        std::vector<std::string> paths;
        paths.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (!metrics_paths[i]) scadatd::raise(scadatd::ErrorCode::invalid_argument,
                                                  "report: NULL path in metrics list");
            paths.emplace_back(metrics_paths[i]);
        }
        scadatd::write_report(paths, out_path);
        return SCADATD_OK;
    });
}

} // extern "C"
