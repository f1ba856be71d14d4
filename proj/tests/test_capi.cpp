#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <scadatd/scadatd.h>

#include "test_util.hpp"

namespace {

template <auto F>
struct FreeWith {
    template <class T>
    void operator()(T* p) const { F(p); }
};
using StreamPtr = std::unique_ptr<scadatd_stream, FreeWith<scadatd_stream_free>>;
using BuildPtr = std::unique_ptr<scadatd_build, FreeWith<scadatd_build_free>>;
using DetectorPtr = std::unique_ptr<scadatd_detector, FreeWith<scadatd_detector_free>>;
using ScoresPtr = std::unique_ptr<scadatd_scores, FreeWith<scadatd_scores_free>>;
using ProfilePtr = std::unique_ptr<scadatd_profile, FreeWith<scadatd_profile_free>>;
using MetricsPtr = std::unique_ptr<scadatd_metrics, FreeWith<scadatd_metrics_free>>;
using SweepPtr = std::unique_ptr<scadatd_sweep, FreeWith<scadatd_sweep_free>>;

// Two rtus on steady clocks, three points values, two channels.
std::string write_train_csv(testutil::ScratchDir& dir) {
    const std::string path = dir.file("train.csv");
    std::ofstream out(path);
    out << "timestamp_ms,rtu_id,points_requested,channel\n";
    for (int k = 0; k < 40; ++k)
        out << 1000 + 100 * k << ",RTU_0," << (k % 2 ? 2 : 1) << ",CH_0\n";
    for (int k = 0; k < 30; ++k) out << 1000 + 250 * k << ",RTU_1,4,CH_1\n";
    return path;
}

StreamPtr load_stream(const std::string& path) {
    scadatd_stream* raw = nullptr;
    REQUIRE(scadatd_stream_load(path.c_str(), &raw) == SCADATD_OK);
    return StreamPtr(raw);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("version and defaults are visible across the boundary") {
    CHECK(std::strcmp(scadatd_version(), "1.0.0") == 0);
    CHECK(scadatd_last_error() != nullptr);

    scadatd_fit_options opt;
    scadatd_fit_options_default(&opt);
    CHECK(opt.max_outer == 200);
    CHECK(opt.max_inner == 10);
    CHECK(opt.tol == 1e-4);
    CHECK(opt.kappa == 1e-2);
    CHECK(opt.kappa_tol == 1e-10);
    CHECK(opt.eps_div == 1e-10);
    CHECK(opt.seed == 0);

    scadatd_scenario sc;
    scadatd_scenario_default(&sc);
    CHECK(std::strcmp(sc.name, "blackbox") == 0);
    CHECK(sc.rtu_lo == 0);
    CHECK(sc.rtu_hi == 255);
    CHECK(sc.points_lo == 1);
    CHECK(sc.points_hi == 64);
    CHECK(sc.benign_count == 0);
    CHECK(sc.anomaly_count == 0);
}

TEST_CASE("the poisson tail crosses the boundary intact") {
    double p = -1.0;
    REQUIRE(scadatd_poisson_tail(2, 1.0, &p) == SCADATD_OK);
    CHECK(p == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));

    REQUIRE(scadatd_poisson_tail(0, 3.0, &p) == SCADATD_OK);
    CHECK(p == 1.0);

    CHECK(scadatd_poisson_tail(1, 0.0, &p) == SCADATD_ERR_INVALID_ARGUMENT);
    CHECK(std::string(scadatd_last_error()).find("rate") != std::string::npos);
    CHECK(scadatd_poisson_tail(1, 1.0, nullptr) == SCADATD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("the whole pipeline runs through the shared library") {
    testutil::ScratchDir dir("capi");
    const std::string train_path = write_train_csv(dir);

    StreamPtr train = load_stream(train_path);
    size_t n = 0;
    REQUIRE(scadatd_stream_count(train.get(), &n) == SCADATD_OK);
    CHECK(n == 70);
    int labeled = -1;
    REQUIRE(scadatd_stream_labeled(train.get(), &labeled) == SCADATD_OK);
    CHECK(labeled == 0);

    // Profile, then a labeled grey-box scenario.
    scadatd_profile* profile_raw = nullptr;
    REQUIRE(scadatd_profile_learn(train.get(), &profile_raw) == SCADATD_OK);
    ProfilePtr profile(profile_raw);
    size_t n_rtus = 0, n_points = 0, n_channels = 0, n_triples = 0;
    REQUIRE(scadatd_profile_info(profile.get(), &n_rtus, &n_points, &n_channels, &n_triples) ==
            SCADATD_OK);
    CHECK(n_rtus == 2);
    CHECK(n_points == 3);
    CHECK(n_channels == 2);
    CHECK(n_triples == 3);

    const std::string profile_path = dir.file("profile.json");
    REQUIRE(scadatd_profile_save(profile.get(), profile_path.c_str()) == SCADATD_OK);
    scadatd_profile* reloaded_raw = nullptr;
    REQUIRE(scadatd_profile_load(profile_path.c_str(), &reloaded_raw) == SCADATD_OK);
    ProfilePtr reloaded(reloaded_raw);

    scadatd_scenario sc;
    scadatd_scenario_default(&sc);
    sc.name = "greybox1";
    sc.benign_count = 500;
    sc.anomaly_count = 20;
    sc.seed = 7;
    scadatd_stream* test_raw = nullptr;
    REQUIRE(scadatd_simulate_scenario(reloaded.get(), &sc, &test_raw) == SCADATD_OK);
    StreamPtr test(test_raw);
    REQUIRE(scadatd_stream_count(test.get(), &n) == SCADATD_OK);
    CHECK(n == 520);
    REQUIRE(scadatd_stream_labeled(test.get(), &labeled) == SCADATD_OK);
    CHECK(labeled == 1);

    // Build, train, persist, reload.
    scadatd_build* build_raw = nullptr;
    REQUIRE(scadatd_build_create(train.get(), "IPC", 200, &build_raw) == SCADATD_OK);
    BuildPtr build(build_raw);
    size_t nnz = 0, first = 99, oov = 99;
    long long inflation = 0;
    REQUIRE(scadatd_build_info(build.get(), &nnz, &first, &oov, &inflation) == SCADATD_OK);
    CHECK(nnz == 3);
    CHECK(first == 0);
    CHECK(oov == 0);
    CHECK(inflation == 4); // 12 cells over 3 occupied

    const std::string build_dir = dir.file("build-ipc");
    std::filesystem::create_directories(build_dir);
    REQUIRE(scadatd_build_save(build.get(), build_dir.c_str()) == SCADATD_OK);
    scadatd_build* build2_raw = nullptr;
    REQUIRE(scadatd_build_load(build_dir.c_str(), &build2_raw) == SCADATD_OK);
    BuildPtr build2(build2_raw);
    size_t nnz2 = 0;
    REQUIRE(scadatd_build_info(build2.get(), &nnz2, &first, &oov, &inflation) == SCADATD_OK);
    CHECK(nnz2 == nnz);

    scadatd_fit_options opt;
    scadatd_fit_options_default(&opt);
    opt.seed = 3;
    scadatd_detector* det_raw = nullptr;
    REQUIRE(scadatd_train_cpapr(build.get(), 2, &opt, &det_raw) == SCADATD_OK);
    DetectorPtr detector(det_raw);
    CHECK(std::string(scadatd_detector_kind(detector.get())) == "cpapr");
    CHECK(std::string(scadatd_detector_tag(detector.get())) == "cpapr-IPC");
    size_t rank = 0;
    REQUIRE(scadatd_detector_rank(detector.get(), &rank) == SCADATD_OK);
    CHECK(rank == 2);
    double objective = 0.0;
    REQUIRE(scadatd_detector_objective(detector.get(), &objective) == SCADATD_OK);
    CHECK(std::isfinite(objective));

    const std::string det_path = dir.file("detector.json");
    REQUIRE(scadatd_detector_save(detector.get(), det_path.c_str()) == SCADATD_OK);
    scadatd_detector* det2_raw = nullptr;
    REQUIRE(scadatd_detector_load(det_path.c_str(), &det2_raw) == SCADATD_OK);
    DetectorPtr detector2(det2_raw);
    CHECK(std::string(scadatd_detector_tag(detector2.get())) == "cpapr-IPC");

    // Score with both the trained and the reloaded detector.
    scadatd_scores* scores_raw = nullptr;
    REQUIRE(scadatd_score(detector.get(), test.get(), &scores_raw) == SCADATD_OK);
    ScoresPtr scores(scores_raw);
    scadatd_scores* scores2_raw = nullptr;
    REQUIRE(scadatd_score(detector2.get(), test.get(), &scores2_raw) == SCADATD_OK);
    ScoresPtr scores2(scores2_raw);

    size_t scored = 0, scored2 = 0, skipped = 99;
    REQUIRE(scadatd_scores_count(scores.get(), &scored) == SCADATD_OK);
    REQUIRE(scadatd_scores_count(scores2.get(), &scored2) == SCADATD_OK);
    REQUIRE(scadatd_scores_skipped(scores.get(), &skipped) == SCADATD_OK);
    CHECK(scored == 520); // timeless layout: nothing skipped
    CHECK(scored2 == scored);
    CHECK(skipped == 0);
    for (size_t i = 0; i < scored; ++i) {
        double p = -1.0, p2 = -1.0;
        int is_oov = -1, is_oov2 = -1;
        REQUIRE(scadatd_scores_value(scores.get(), i, &p, &is_oov) == SCADATD_OK);
        REQUIRE(scadatd_scores_value(scores2.get(), i, &p2, &is_oov2) == SCADATD_OK);
        CHECK(p == p2); // the persisted model scores identically
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        if (is_oov) CHECK(p == 0.0);
    }

    // Persist scores, reload, evaluate, persist metrics, aggregate.
    const std::string scores_path = dir.file("scores.csv");
    REQUIRE(scadatd_scores_save_csv(scores.get(), scores_path.c_str(), nullptr) == SCADATD_OK);
    scadatd_scores* loaded_raw = nullptr;
    REQUIRE(scadatd_scores_load_csv(scores_path.c_str(), &loaded_raw) == SCADATD_OK);
    ScoresPtr loaded(loaded_raw);
    REQUIRE(scadatd_scores_labeled(loaded.get(), &labeled) == SCADATD_OK);
    CHECK(labeled == 1);

    scadatd_metrics* metrics_raw = nullptr;
    REQUIRE(scadatd_evaluate(loaded.get(), &metrics_raw) == SCADATD_OK);
    MetricsPtr metrics(metrics_raw);
    double roc_auc = -1.0, pr_auc = -1.0;
    size_t n_anomalous = 0, n_benign = 0;
    REQUIRE(scadatd_metrics_values(metrics.get(), &roc_auc, &pr_auc, &n_anomalous, &n_benign) ==
            SCADATD_OK);
    CHECK(n_anomalous == 20);
    CHECK(n_benign == 500);
    CHECK(roc_auc >= 0.0);
    CHECK(roc_auc <= 1.0);
    CHECK(pr_auc >= 0.0);
    CHECK(pr_auc <= 1.0);

    const std::string metrics_path = dir.file("metrics.json");
    REQUIRE(scadatd_metrics_save(metrics.get(), metrics_path.c_str(), dir.file("roc.csv").c_str(),
                                 dir.file("pr.csv").c_str(), "cpapr-IPC") == SCADATD_OK);
    CHECK(slurp(dir.file("roc.csv")).rfind("fpr,tpr\n", 0) == 0);
    CHECK(slurp(dir.file("pr.csv")).rfind("recall,precision\n", 0) == 0);

    const char* paths[] = {metrics_path.c_str()};
    const std::string report_path = dir.file("report.json");
    REQUIRE(scadatd_report_write(paths, 1, report_path.c_str()) == SCADATD_OK);
    const std::string report = slurp(report_path);
    CHECK(report.find("scadatd-report") != std::string::npos);
    CHECK(report.find("cpapr-IPC") != std::string::npos);
}

TEST_CASE("time-bearing layouts report their skipped first occurrences") {
    testutil::ScratchDir dir("capi-time");
    StreamPtr train = load_stream(write_train_csv(dir));

    scadatd_build* build_raw = nullptr;
    REQUIRE(scadatd_build_create(train.get(), "IPCT", 20, &build_raw) == SCADATD_OK);
    BuildPtr build(build_raw);
    size_t nnz = 0, first = 0, oov = 0;
    long long inflation = -1;
    REQUIRE(scadatd_build_info(build.get(), &nnz, &first, &oov, &inflation) == SCADATD_OK);
    CHECK(first == 2); // one per rtu
    CHECK(inflation == 1);

    scadatd_detector* det_raw = nullptr;
    REQUIRE(scadatd_train_cpapr(build.get(), 2, nullptr, &det_raw) == SCADATD_OK);
    DetectorPtr detector(det_raw);

    scadatd_scores* scores_raw = nullptr;
    REQUIRE(scadatd_score(detector.get(), train.get(), &scores_raw) == SCADATD_OK);
    ScoresPtr scores(scores_raw);
    size_t scored = 0, skipped = 0;
    REQUIRE(scadatd_scores_count(scores.get(), &scored) == SCADATD_OK);
    REQUIRE(scadatd_scores_skipped(scores.get(), &skipped) == SCADATD_OK);
    CHECK(skipped == 2);
    CHECK(scored == 68);
}

TEST_CASE("baselines train with their layout defaults") {
    testutil::ScratchDir dir("capi-base");
    StreamPtr train = load_stream(write_train_csv(dir));

    SUBCASE("nmf rank 0 picks the layout default") {
        scadatd_detector* det_raw = nullptr;
        REQUIRE(scadatd_train_nmf(train.get(), "IxP", 0, nullptr, &det_raw) == SCADATD_OK);
        DetectorPtr det(det_raw);
        CHECK(std::string(scadatd_detector_kind(det.get())) == "nmf");
        CHECK(std::string(scadatd_detector_tag(det.get())) == "nmf-IxP");
        size_t rank = 0;
        REQUIRE(scadatd_detector_rank(det.get(), &rank) == SCADATD_OK);
        CHECK(rank == 24);

        scadatd_scores* scores_raw = nullptr;
        REQUIRE(scadatd_score(det.get(), train.get(), &scores_raw) == SCADATD_OK);
        ScoresPtr scores(scores_raw);
        size_t scored = 0;
        REQUIRE(scadatd_scores_count(scores.get(), &scored) == SCADATD_OK);
        CHECK(scored == 70);
    }

    SUBCASE("pca reports its component count as rank") {
        scadatd_detector* det_raw = nullptr;
        REQUIRE(scadatd_train_pca(train.get(), 20, 0.95, &det_raw) == SCADATD_OK);
        DetectorPtr det(det_raw);
        CHECK(std::string(scadatd_detector_tag(det.get())) == "pca");
        size_t k = 0;
        REQUIRE(scadatd_detector_rank(det.get(), &k) == SCADATD_OK);
        CHECK(k >= 1);
        double captured = 0.0;
        REQUIRE(scadatd_detector_objective(det.get(), &captured) == SCADATD_OK);
        CHECK(captured >= 0.95 - 1e-9);
        CHECK(captured <= 1.0 + 1e-12);

        scadatd_scores* scores_raw = nullptr;
        REQUIRE(scadatd_score(det.get(), train.get(), &scores_raw) == SCADATD_OK);
        ScoresPtr scores(scores_raw);
        size_t scored = 0, skipped = 0;
        REQUIRE(scadatd_scores_count(scores.get(), &scored) == SCADATD_OK);
        REQUIRE(scadatd_scores_skipped(scores.get(), &skipped) == SCADATD_OK);
        CHECK(skipped == 2); // the per-rtu first occurrences have no gap
        CHECK(scored == 68);
    }
}

TEST_CASE("the sweep selects a rank through the boundary") {
    testutil::ScratchDir dir("capi-sweep");
    StreamPtr train = load_stream(write_train_csv(dir));

    scadatd_profile* profile_raw = nullptr;
    REQUIRE(scadatd_profile_learn(train.get(), &profile_raw) == SCADATD_OK);
    ProfilePtr profile(profile_raw);
    scadatd_scenario sc;
    scadatd_scenario_default(&sc);
    sc.name = "greybox1";
    sc.benign_count = 200;
    sc.anomaly_count = 10;
    sc.seed = 13;
    scadatd_stream* val_raw = nullptr;
    REQUIRE(scadatd_simulate_scenario(profile.get(), &sc, &val_raw) == SCADATD_OK);
    StreamPtr validation(val_raw);

    scadatd_build* build_raw = nullptr;
    REQUIRE(scadatd_build_create(train.get(), "IPC", 200, &build_raw) == SCADATD_OK);
    BuildPtr build(build_raw);

    const size_t ranks[] = {1, 2, 3};
    scadatd_sweep* sweep_raw = nullptr;
    REQUIRE(scadatd_sweep_run(build.get(), validation.get(), ranks, 3, nullptr, &sweep_raw) ==
            SCADATD_OK);
    SweepPtr sweep(sweep_raw);

    size_t count = 0;
    REQUIRE(scadatd_sweep_size(sweep.get(), &count) == SCADATD_OK);
    CHECK(count == 3);
    size_t best = 0;
    REQUIRE(scadatd_sweep_best_rank(sweep.get(), &best) == SCADATD_OK);
    double best_auc = -1.0;
    for (size_t i = 0; i < count; ++i) {
        size_t rank = 0;
        double auc = -1.0;
        REQUIRE(scadatd_sweep_entry(sweep.get(), i, &rank, &auc) == SCADATD_OK);
        CHECK(rank == ranks[i]);
        CHECK(auc >= 0.0);
        CHECK(auc <= 1.0);
        if (rank == best) best_auc = auc;
    }
    {
        size_t rank = 0;
        double auc = -1.0;
        CHECK(scadatd_sweep_entry(sweep.get(), 99, &rank, &auc) == SCADATD_ERR_INVALID_ARGUMENT);
    }
    for (size_t i = 0; i < count; ++i) {
        size_t rank = 0;
        double auc = -1.0;
        REQUIRE(scadatd_sweep_entry(sweep.get(), i, &rank, &auc) == SCADATD_OK);
        CHECK(auc <= best_auc);
    }

    const std::string sweep_path = dir.file("sweep.json");
    REQUIRE(scadatd_sweep_save(sweep.get(), sweep_path.c_str()) == SCADATD_OK);
    CHECK(slurp(sweep_path).find("scadatd-sweep") != std::string::npos);
}

TEST_CASE("failures map onto stable status codes with messages") {
    testutil::ScratchDir dir("capi-err");

    SUBCASE("missing file is an io error naming the path") {
        scadatd_stream* raw = nullptr;
        const std::string path = dir.file("absent.csv");
        CHECK(scadatd_stream_load(path.c_str(), &raw) == SCADATD_ERR_IO);
        CHECK(raw == nullptr);
        CHECK(std::string(scadatd_last_error()).find("absent.csv") != std::string::npos);
    }
    SUBCASE("unknown schema is invalid argument") {
        StreamPtr train = load_stream(write_train_csv(dir));
        scadatd_build* raw = nullptr;
        CHECK(scadatd_build_create(train.get(), "XYZ", 200, &raw) == SCADATD_ERR_INVALID_ARGUMENT);
    }
    SUBCASE("malformed rows are data errors naming the line") {
        const std::string path = dir.file("bad.csv");
        std::ofstream(path) << "timestamp_ms,rtu_id,points_requested,channel\nnonsense\n";
        scadatd_stream* raw = nullptr;
        CHECK(scadatd_stream_load(path.c_str(), &raw) == SCADATD_ERR_DATA);
        CHECK(std::string(scadatd_last_error()).find("line 2") != std::string::npos);
    }
    SUBCASE("rank zero is rejected before fitting") {
        StreamPtr train = load_stream(write_train_csv(dir));
        scadatd_build* build_raw = nullptr;
        REQUIRE(scadatd_build_create(train.get(), "IPC", 200, &build_raw) == SCADATD_OK);
        BuildPtr build(build_raw);
        scadatd_detector* det_raw = nullptr;
        CHECK(scadatd_train_cpapr(build.get(), 0, nullptr, &det_raw) ==
              SCADATD_ERR_INVALID_ARGUMENT);
    }
    SUBCASE("evaluating unlabeled scores is a data error") {
        StreamPtr train = load_stream(write_train_csv(dir));
        scadatd_build* build_raw = nullptr;
        REQUIRE(scadatd_build_create(train.get(), "IPC", 200, &build_raw) == SCADATD_OK);
        BuildPtr build(build_raw);
        scadatd_detector* det_raw = nullptr;
        REQUIRE(scadatd_train_cpapr(build.get(), 1, nullptr, &det_raw) == SCADATD_OK);
        DetectorPtr det(det_raw);
        scadatd_scores* scores_raw = nullptr;
        REQUIRE(scadatd_score(det.get(), train.get(), &scores_raw) == SCADATD_OK);
        ScoresPtr scores(scores_raw);
        scadatd_metrics* metrics_raw = nullptr;
        CHECK(scadatd_evaluate(scores.get(), &metrics_raw) == SCADATD_ERR_DATA);
    }
    SUBCASE("NULL handles are reported, not dereferenced") {
        CHECK(scadatd_stream_count(nullptr, nullptr) == SCADATD_ERR_INVALID_ARGUMENT);
        CHECK(std::string(scadatd_last_error()).find("NULL") != std::string::npos);
        scadatd_detector* det_raw = nullptr;
        CHECK(scadatd_train_cpapr(nullptr, 1, nullptr, &det_raw) == SCADATD_ERR_INVALID_ARGUMENT);
        CHECK(std::string(scadatd_detector_kind(nullptr)).empty());
    }
    SUBCASE("free accepts NULL for every handle type") {
        scadatd_stream_free(nullptr);
        scadatd_build_free(nullptr);
        scadatd_detector_free(nullptr);
        scadatd_scores_free(nullptr);
        scadatd_profile_free(nullptr);
        scadatd_metrics_free(nullptr);
        scadatd_sweep_free(nullptr);
        CHECK(true);
    }
}
