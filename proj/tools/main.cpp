// scadatd command-line pipeline. Each command reads and writes filesystem
// artifacts through the shared library; a JSON config file can supply any
// value a flag would, and flags given on the command line win.

#include <scadatd/scadatd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Carries an exit code out of a command body.
struct Failure {
    int code;
};

int exit_for(scadatd_status status) {
    switch (status) {
        case SCADATD_OK: return 0;
        case SCADATD_ERR_INVALID_ARGUMENT: return 1;
        case SCADATD_ERR_DATA:
        case SCADATD_ERR_IO: return 2;
        default: return 3;
    }
}

void check(scadatd_status status) {
    if (status == SCADATD_OK) return;
    std::cerr << "scadatd: " << scadatd_last_error() << "\n";
    throw Failure{exit_for(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
    std::cerr << "scadatd: " << message << "\n";
    throw Failure{1};
}

// Owning wrapper for a library handle.
template <typename T, void (*Free)(T*)>
class Owned {
  public:
    Owned() = default;
    ~Owned() { Free(ptr_); }
    Owned(const Owned&) = delete;
    Owned& operator=(const Owned&) = delete;
    T** out() { return &ptr_; }
    T* get() const { return ptr_; }

  private:
    T* ptr_ = nullptr;
};

using Stream = Owned<scadatd_stream, scadatd_stream_free>;
using Build = Owned<scadatd_build, scadatd_build_free>;
using ModelHandle = Owned<scadatd_detector, scadatd_detector_free>;
using Scores = Owned<scadatd_scores, scadatd_scores_free>;
using Profile = Owned<scadatd_profile, scadatd_profile_free>;
using Metrics = Owned<scadatd_metrics, scadatd_metrics_free>;
using Sweep = Owned<scadatd_sweep, scadatd_sweep_free>;

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) usage_error("cannot open config file: " + path);
    try {
        json j = json::parse(in);
        if (!j.is_object()) usage_error("config file must hold a JSON object: " + path);
        return j;
    } catch (const json::exception& e) {
        usage_error("config file " + path + ": " + e.what());
    }
}

json section_of(const json& config, const char* command) {
    if (config.contains(command) && config.at(command).is_object()) return config.at(command);
    return json::object();
}

// Config fills in anything the command line left untouched.
template <typename T>
void fill(const json& section, const CLI::Option* opt, const char* key, T& var) {
    if (opt->count() > 0) return;
    if (!section.contains(key)) return;
    try {
        var = section.at(key).get<T>();
    } catch (const json::exception& e) {
        usage_error(std::string("config key '") + key + "': " + e.what());
    }
}

std::string default_out_dir(const json& config) {
    if (config.contains("output_dir") && config.at("output_dir").is_string())
        return config.at("output_dir").get<std::string>();
    if (const char* env = std::getenv("SCADATD_OUT"); env && *env) return env;
    return ".";
}

void ensure_parent_dir(const std::string& path) {
    std::error_code ec;
    const fs::path parent = fs::path(path).parent_path();
    if (parent.empty()) return;
    fs::create_directories(parent, ec);
    if (ec) usage_error("cannot create directory " + parent.string() + ": " + ec.message());
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) usage_error("cannot create directory " + dir + ": " + ec.message());
}

void require(const std::string& value, const char* what) {
    if (value.empty()) usage_error(std::string(what) + " is required (flag or config)");
}

scadatd_fit_options fit_options_from(const json& section, const CLI::Option* outer_opt,
                                     const CLI::Option* inner_opt, const CLI::Option* tol_opt,
                                     const CLI::Option* seed_opt, size_t max_outer, size_t max_inner,
                                     double tol, uint64_t seed) {
    scadatd_fit_options o;
    scadatd_fit_options_default(&o);
    if (outer_opt->count() > 0) o.max_outer = max_outer;
    else if (section.contains("max_outer")) o.max_outer = section.at("max_outer").get<size_t>();
    if (inner_opt->count() > 0) o.max_inner = max_inner;
    else if (section.contains("max_inner")) o.max_inner = section.at("max_inner").get<size_t>();
    if (tol_opt->count() > 0) o.tol = tol;
    else if (section.contains("tol")) o.tol = section.at("tol").get<double>();
    if (seed_opt->count() > 0) o.seed = seed;
    else if (section.contains("seed")) o.seed = section.at("seed").get<uint64_t>();
    return o;
}

void print_skip_report(size_t first_occurrence, size_t oov) {
    std::cerr << "skip-report: first_occurrence=" << first_occurrence << " oov=" << oov << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson tensor anomaly detection for SCADA message logs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(scadatd_version()));

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with per-command sections");

    // build
    auto* build_cmd = app.add_subcommand("build", "Build a sparse count tensor from a message log");
    std::string b_input, b_schema = "IPC", b_out;
    size_t b_bins = 200;
    auto* b_input_opt = build_cmd->add_option("--input", b_input, "message log (.csv or .jsonl)");
    auto* b_schema_opt = build_cmd->add_option("--schema", b_schema, "tensor layout: IPT, IPCT, or IPC");
    auto* b_bins_opt = build_cmd->add_option("--bins", b_bins, "target time-bin count");
    auto* b_out_opt = build_cmd->add_option("--out", b_out, "output directory for build artifacts");

    // train
    auto* train_cmd = app.add_subcommand("train", "Fit a detector and persist it");
    std::string t_model = "cpapr", t_build, t_input, t_nmf_schema = "IxP", t_out;
    size_t t_rank = 0, t_bins = 200, t_outer = 0, t_inner = 0;
    double t_variance = 0.95, t_tol = 0.0;
    uint64_t t_seed = 0;
    auto* t_model_opt =
        train_cmd->add_option("--model", t_model, "detector family: cpapr, nmf-ixp, nmf-ixc, or pca");
    auto* t_build_opt = train_cmd->add_option("--build", t_build, "build directory (cpapr)");
    auto* t_input_opt = train_cmd->add_option("--input", t_input, "message log (nmf and pca)");
    auto* t_rank_opt = train_cmd->add_option("--rank", t_rank, "component count");
    auto* t_bins_opt = train_cmd->add_option("--bins", t_bins, "target time-bin count (pca)");
    auto* t_variance_opt =
        train_cmd->add_option("--variance", t_variance, "captured-variance target (pca)");
    auto* t_out_opt = train_cmd->add_option("--out", t_out, "model file path");
    auto* t_outer_opt = train_cmd->add_option("--max-outer", t_outer, "outer iteration budget");
    auto* t_inner_opt = train_cmd->add_option("--max-inner", t_inner, "inner updates per mode");
    auto* t_tol_opt = train_cmd->add_option("--tol", t_tol, "KKT stopping tolerance");
    auto* t_seed_opt = train_cmd->add_option("--seed", t_seed, "factor initialization seed");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Pick a rank by PR area on labeled validation data");
    std::string s_build, s_validation, s_out;
    std::vector<size_t> s_ranks;
    size_t s_outer = 0, s_inner = 0;
    double s_tol = 0.0;
    uint64_t s_seed = 0;
    auto* s_build_opt = sweep_cmd->add_option("--build", s_build, "build directory");
    auto* s_validation_opt =
        sweep_cmd->add_option("--validation", s_validation, "labeled validation message log");
    auto* s_ranks_opt = sweep_cmd->add_option("--ranks", s_ranks, "candidate ranks (default grid if omitted)");
    auto* s_out_opt = sweep_cmd->add_option("--out", s_out, "sweep result file path");
    auto* s_outer_opt = sweep_cmd->add_option("--max-outer", s_outer, "outer iteration budget");
    auto* s_inner_opt = sweep_cmd->add_option("--max-inner", s_inner, "inner updates per mode");
    auto* s_tol_opt = sweep_cmd->add_option("--tol", s_tol, "KKT stopping tolerance");
    auto* s_seed_opt = sweep_cmd->add_option("--seed", s_seed, "factor initialization seed");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate labeled synthetic traffic from a profile");
    std::string m_profile, m_profile_from, m_save_profile, m_out_dir;
    std::vector<std::string> m_scenarios;
    size_t m_benign = 10000, m_anomalies = 100;
    int m_rtu_lo = 0, m_rtu_hi = 255, m_points_lo = 1, m_points_hi = 64;
    uint64_t m_seed = 0;
    int64_t m_start_ts = 0;
    bool m_benign_only = false;
    auto* m_profile_opt = sim_cmd->add_option("--profile", m_profile, "profile file learned earlier");
    auto* m_profile_from_opt =
        sim_cmd->add_option("--profile-from", m_profile_from, "message log to learn the profile from");
    auto* m_save_profile_opt =
        sim_cmd->add_option("--save-profile", m_save_profile, "also write the learned profile here");
    auto* m_scenarios_opt = sim_cmd->add_option(
        "--scenario", m_scenarios, "attack scenario: blackbox, greybox1, or greybox2 (repeatable)");
    auto* m_benign_opt = sim_cmd->add_option("--benign", m_benign, "benign message count");
    auto* m_anomalies_opt = sim_cmd->add_option("--anomalies", m_anomalies, "anomalous message count");
    auto* m_rtu_lo_opt = sim_cmd->add_option("--rtu-lo", m_rtu_lo, "protocol RTU range low (blackbox)");
    auto* m_rtu_hi_opt = sim_cmd->add_option("--rtu-hi", m_rtu_hi, "protocol RTU range high (blackbox)");
    auto* m_points_lo_opt =
        sim_cmd->add_option("--points-lo", m_points_lo, "protocol points range low (blackbox)");
    auto* m_points_hi_opt =
        sim_cmd->add_option("--points-hi", m_points_hi, "protocol points range high (blackbox)");
    auto* m_seed_opt = sim_cmd->add_option("--seed", m_seed, "traffic generation seed");
    auto* m_start_ts_opt = sim_cmd->add_option("--start-ts", m_start_ts, "first timestamp (ms)");
    auto* m_benign_only_opt =
        sim_cmd->add_flag("--benign-only", m_benign_only, "write a benign stream with no anomalies");
    auto* m_out_dir_opt = sim_cmd->add_option("--out-dir", m_out_dir, "directory for generated streams");

    // score
    auto* score_cmd = app.add_subcommand("score", "Score a message log with a trained detector");
    std::string c_model, c_input, c_out, c_tag;
    auto* c_model_opt = score_cmd->add_option("--model", c_model, "model file path");
    auto* c_input_opt = score_cmd->add_option("--input", c_input, "message log to score");
    auto* c_out_opt = score_cmd->add_option("--out", c_out, "score CSV path");
    auto* c_tag_opt =
        score_cmd->add_option("--tag", c_tag, "value for a model column in the CSV (omitted when empty)");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Compute ROC and PR curves from labeled scores");
    std::string e_scores, e_metrics, e_roc, e_pr, e_tag;
    auto* e_scores_opt = eval_cmd->add_option("--scores", e_scores, "score CSV with a label column");
    auto* e_metrics_opt = eval_cmd->add_option("--out-metrics", e_metrics, "metrics document path");
    auto* e_roc_opt = eval_cmd->add_option("--roc", e_roc, "ROC curve CSV path");
    auto* e_pr_opt = eval_cmd->add_option("--pr", e_pr, "PR curve CSV path");
    auto* e_tag_opt = eval_cmd->add_option("--tag", e_tag, "model tag recorded in the metrics document");

    // report
    auto* report_cmd = app.add_subcommand("report", "Aggregate metrics documents into one summary");
    std::vector<std::string> r_metrics;
    std::string r_out;
    auto* r_metrics_opt = report_cmd->add_option("--metrics", r_metrics, "metrics document paths");
    auto* r_out_opt = report_cmd->add_option("--out", r_out, "summary document path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e); // CLI11 prints the diagnostic; --help exits 0
    }

    try {
        const json config = load_config_file(config_path);
        const std::string out_dir = default_out_dir(config);

        if (app.got_subcommand(build_cmd)) {
            const json sec = section_of(config, "build");
            fill(sec, b_input_opt, "input", b_input);
            fill(sec, b_schema_opt, "schema", b_schema);
            fill(sec, b_bins_opt, "bins", b_bins);
            fill(sec, b_out_opt, "out", b_out);
            require(b_input, "build: --input");
            if (b_out.empty()) b_out = out_dir + "/build-" + b_schema;

            Stream stream;
            check(scadatd_stream_load(b_input.c_str(), stream.out()));
            Build build;
            check(scadatd_build_create(stream.get(), b_schema.c_str(), b_bins, build.out()));
            ensure_dir(b_out);
            check(scadatd_build_save(build.get(), b_out.c_str()));
            size_t nnz = 0, skip_first = 0, skip_oov = 0;
            long long inflation = 0;
            check(scadatd_build_info(build.get(), &nnz, &skip_first, &skip_oov, &inflation));
            print_skip_report(skip_first, skip_oov);
            std::cout << "build: schema=" << b_schema << " nnz=" << nnz
                      << " inflation=" << inflation << " out=" << b_out << "\n";
            return 0;
        }

        if (app.got_subcommand(train_cmd)) {
            const json sec = section_of(config, "train");
            fill(sec, t_model_opt, "model", t_model);
            fill(sec, t_build_opt, "build", t_build);
            fill(sec, t_input_opt, "input", t_input);
            fill(sec, t_rank_opt, "rank", t_rank);
            fill(sec, t_bins_opt, "bins", t_bins);
            fill(sec, t_variance_opt, "variance", t_variance);
            fill(sec, t_out_opt, "out", t_out);
            const scadatd_fit_options fit = fit_options_from(sec, t_outer_opt, t_inner_opt, t_tol_opt,
                                                             t_seed_opt, t_outer, t_inner, t_tol, t_seed);
            if (t_out.empty()) t_out = out_dir + "/model-" + t_model + ".json";

            ModelHandle detector;
            if (t_model == "cpapr") {
                require(t_build, "train: --build");
                Build build;
                check(scadatd_build_load(t_build.c_str(), build.out()));
                check(scadatd_train_cpapr(build.get(), t_rank, &fit, detector.out()));
            } else if (t_model == "nmf-ixp" || t_model == "nmf-ixc") {
                require(t_input, "train: --input");
                Stream stream;
                check(scadatd_stream_load(t_input.c_str(), stream.out()));
                const char* layout = t_model == "nmf-ixp" ? "IxP" : "IxC";
                check(scadatd_train_nmf(stream.get(), layout, t_rank, &fit, detector.out()));
            } else if (t_model == "pca") {
                require(t_input, "train: --input");
                Stream stream;
                check(scadatd_stream_load(t_input.c_str(), stream.out()));
                check(scadatd_train_pca(stream.get(), t_bins, t_variance, detector.out()));
            } else {
                usage_error("train: unknown --model '" + t_model +
                            "' (expected cpapr, nmf-ixp, nmf-ixc, or pca)");
            }
            ensure_parent_dir(t_out);
            check(scadatd_detector_save(detector.get(), t_out.c_str()));
            size_t rank = 0;
            double objective = 0.0;
            check(scadatd_detector_rank(detector.get(), &rank));
            check(scadatd_detector_objective(detector.get(), &objective));
            std::cout << "train: model=" << scadatd_detector_tag(detector.get()) << " rank=" << rank
                      << " objective=" << objective << " out=" << t_out << "\n";
            return 0;
        }

        if (app.got_subcommand(sweep_cmd)) {
            const json sec = section_of(config, "sweep");
            fill(sec, s_build_opt, "build", s_build);
            fill(sec, s_validation_opt, "validation", s_validation);
            fill(sec, s_ranks_opt, "ranks", s_ranks);
            fill(sec, s_out_opt, "out", s_out);
            const scadatd_fit_options fit = fit_options_from(sec, s_outer_opt, s_inner_opt, s_tol_opt,
                                                             s_seed_opt, s_outer, s_inner, s_tol, s_seed);
            require(s_build, "sweep: --build");
            require(s_validation, "sweep: --validation");
            if (s_out.empty()) s_out = out_dir + "/sweep.json";

            Build build;
            check(scadatd_build_load(s_build.c_str(), build.out()));
            Stream validation;
            check(scadatd_stream_load(s_validation.c_str(), validation.out()));
            Sweep sweep;
            check(scadatd_sweep_run(build.get(), validation.get(), s_ranks.data(), s_ranks.size(),
                                    &fit, sweep.out()));
            ensure_parent_dir(s_out);
            check(scadatd_sweep_save(sweep.get(), s_out.c_str()));
            size_t n = 0, best = 0;
            check(scadatd_sweep_size(sweep.get(), &n));
            check(scadatd_sweep_best_rank(sweep.get(), &best));
            for (size_t i = 0; i < n; ++i) {
                size_t rank = 0;
                double auc = 0.0;
                check(scadatd_sweep_entry(sweep.get(), i, &rank, &auc));
                std::cout << "sweep: rank=" << rank << " pr_auc=" << auc << "\n";
            }
            std::cout << "sweep: best_rank=" << best << " out=" << s_out << "\n";
            return 0;
        }

        if (app.got_subcommand(sim_cmd)) {
            const json sec = section_of(config, "simulate");
            fill(sec, m_profile_opt, "profile", m_profile);
            fill(sec, m_profile_from_opt, "profile_from", m_profile_from);
            fill(sec, m_save_profile_opt, "save_profile", m_save_profile);
            fill(sec, m_scenarios_opt, "scenarios", m_scenarios);
            fill(sec, m_benign_opt, "benign", m_benign);
            fill(sec, m_anomalies_opt, "anomalies", m_anomalies);
            fill(sec, m_rtu_lo_opt, "rtu_lo", m_rtu_lo);
            fill(sec, m_rtu_hi_opt, "rtu_hi", m_rtu_hi);
            fill(sec, m_points_lo_opt, "points_lo", m_points_lo);
            fill(sec, m_points_hi_opt, "points_hi", m_points_hi);
            fill(sec, m_seed_opt, "seed", m_seed);
            fill(sec, m_start_ts_opt, "start_ts", m_start_ts);
            fill(sec, m_out_dir_opt, "out_dir", m_out_dir);
            if (m_benign_only_opt->count() == 0 && sec.contains("benign_only"))
                m_benign_only = sec.at("benign_only").get<bool>();
            if (m_out_dir.empty()) m_out_dir = out_dir;

            Profile profile;
            if (!m_profile.empty()) {
                check(scadatd_profile_load(m_profile.c_str(), profile.out()));
            } else if (!m_profile_from.empty()) {
                Stream history;
                check(scadatd_stream_load(m_profile_from.c_str(), history.out()));
                check(scadatd_profile_learn(history.get(), profile.out()));
            } else {
                usage_error("simulate: --profile or --profile-from is required");
            }
            if (!m_save_profile.empty()) {
                ensure_parent_dir(m_save_profile);
                check(scadatd_profile_save(profile.get(), m_save_profile.c_str()));
                std::cout << "simulate: profile=" << m_save_profile << "\n";
            }
            ensure_dir(m_out_dir);
            if (m_benign_only) {
                Stream benign;
                check(scadatd_simulate_benign(profile.get(), m_benign, m_seed, m_start_ts,
                                              benign.out()));
                const std::string path = m_out_dir + "/benign.csv";
                check(scadatd_stream_save_csv(benign.get(), path.c_str()));
                std::cout << "simulate: scenario=benign total=" << m_benign << " anomalies=0 out="
                          << path << "\n";
            }
            if (!m_benign_only && m_scenarios.empty())
                usage_error("simulate: --scenario or --benign-only is required");
            for (const std::string& name : m_scenarios) {
                scadatd_scenario sc;
                scadatd_scenario_default(&sc);
                sc.name = name.c_str();
                sc.benign_count = m_benign;
                sc.anomaly_count = m_anomalies;
                sc.rtu_lo = m_rtu_lo;
                sc.rtu_hi = m_rtu_hi;
                sc.points_lo = m_points_lo;
                sc.points_hi = m_points_hi;
                sc.seed = m_seed;
                sc.start_ts = m_start_ts;
                Stream labeled;
                check(scadatd_simulate_scenario(profile.get(), &sc, labeled.out()));
                const std::string path = m_out_dir + "/" + name + ".csv";
                check(scadatd_stream_save_csv(labeled.get(), path.c_str()));
                size_t total = 0;
                check(scadatd_stream_count(labeled.get(), &total));
                std::cout << "simulate: scenario=" << name << " total=" << total
                          << " anomalies=" << m_anomalies << " out=" << path << "\n";
            }
            return 0;
        }

        if (app.got_subcommand(score_cmd)) {
            const json sec = section_of(config, "score");
            fill(sec, c_model_opt, "model", c_model);
            fill(sec, c_input_opt, "input", c_input);
            fill(sec, c_out_opt, "out", c_out);
            fill(sec, c_tag_opt, "tag", c_tag);
            require(c_model, "score: --model");
            require(c_input, "score: --input");
            if (c_out.empty()) c_out = out_dir + "/scores.csv";

            ModelHandle detector;
            check(scadatd_detector_load(c_model.c_str(), detector.out()));
            Stream stream;
            check(scadatd_stream_load(c_input.c_str(), stream.out()));
            Scores scores;
            check(scadatd_score(detector.get(), stream.get(), scores.out()));
            ensure_parent_dir(c_out);
            check(scadatd_scores_save_csv(scores.get(), c_out.c_str(),
                                          c_tag.empty() ? nullptr : c_tag.c_str()));
            size_t scored = 0, skipped = 0;
            check(scadatd_scores_count(scores.get(), &scored));
            check(scadatd_scores_skipped(scores.get(), &skipped));
            std::cerr << "skip-report: first_occurrence=" << skipped << "\n";
            std::cout << "score: model=" << scadatd_detector_tag(detector.get())
                      << " scored=" << scored << " skipped=" << skipped << " out=" << c_out << "\n";
            return 0;
        }

        if (app.got_subcommand(eval_cmd)) {
            const json sec = section_of(config, "evaluate");
            fill(sec, e_scores_opt, "scores", e_scores);
            fill(sec, e_metrics_opt, "out_metrics", e_metrics);
            fill(sec, e_roc_opt, "roc", e_roc);
            fill(sec, e_pr_opt, "pr", e_pr);
            fill(sec, e_tag_opt, "tag", e_tag);
            require(e_scores, "evaluate: --scores");
            if (e_metrics.empty()) e_metrics = out_dir + "/metrics.json";
            if (e_roc.empty()) e_roc = out_dir + "/roc.csv";
            if (e_pr.empty()) e_pr = out_dir + "/pr.csv";

            Scores scores;
            check(scadatd_scores_load_csv(e_scores.c_str(), scores.out()));
            int labeled = 0;
            check(scadatd_scores_labeled(scores.get(), &labeled));
            if (!labeled) {
                std::cerr << "evaluate: " << e_scores
                          << " has no label column; skipping evaluation\n";
                return 0;
            }
            Metrics metrics;
            check(scadatd_evaluate(scores.get(), metrics.out()));
            ensure_parent_dir(e_metrics);
            ensure_parent_dir(e_roc);
            ensure_parent_dir(e_pr);
            check(scadatd_metrics_save(metrics.get(), e_metrics.c_str(), e_roc.c_str(), e_pr.c_str(),
                                       e_tag.empty() ? nullptr : e_tag.c_str()));
            double roc_auc = 0.0, pr_auc = 0.0;
            size_t n_anom = 0, n_benign = 0;
            check(scadatd_metrics_values(metrics.get(), &roc_auc, &pr_auc, &n_anom, &n_benign));
            std::cout << "evaluate: roc_auc=" << roc_auc << " pr_auc=" << pr_auc
                      << " anomalous=" << n_anom << " benign=" << n_benign << " out=" << e_metrics
                      << "\n";
            return 0;
        }

        if (app.got_subcommand(report_cmd)) {
            const json sec = section_of(config, "report");
            fill(sec, r_metrics_opt, "metrics", r_metrics);
            fill(sec, r_out_opt, "out", r_out);
            if (r_metrics.empty()) usage_error("report: --metrics is required");
            if (r_out.empty()) r_out = out_dir + "/report.json";

            std::vector<const char*> paths;
            paths.reserve(r_metrics.size());
            for (const std::string& p : r_metrics) paths.push_back(p.c_str());
            ensure_parent_dir(r_out);
            check(scadatd_report_write(paths.data(), paths.size(), r_out.c_str()));
            std::cout << "report: inputs=" << paths.size() << " out=" << r_out << "\n";
            return 0;
        }

        usage_error("no command given");
    } catch (const Failure& f) {
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "scadatd: " << e.what() << "\n";
        return 3;
    }
}
