#include "persist.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <tuple>

#include <json.hpp>

#include "error.hpp"

namespace scadatd {

namespace {

using nlohmann::json;

json load_document(const std::string& path, const char* format, int version) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::io, "cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        raise(ErrorCode::data, path + ": invalid JSON: " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != format)
        raise(ErrorCode::data, path + ": not a " + std::string(format) + " document");
    if (j.value("version", -1) != version)
        raise(ErrorCode::data, path + ": unsupported " + std::string(format) + " version");
    return j;
}

void write_document(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::io, "cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) raise(ErrorCode::io, "write failed: " + path);
}

json encoder_to_json(const DimensionEncoder& e) { return json(e.tokens()); }

DimensionEncoder encoder_from_json(const json& j) {
    std::vector<std::string> tokens = j.get<std::vector<std::string>>();
    if (tokens.empty()) return {};
    return DimensionEncoder::from_tokens(tokens);
}

json codebook_to_json(const Codebook& cb) {
    json j;
    j["schema"] = schema_name(cb.schema);
    j["rtu"] = encoder_to_json(cb.rtu);
    j["points"] = encoder_to_json(cb.points);
    j["channel"] = encoder_to_json(cb.channel);
    if (cb.binning) {
        j["binning"] = {{"edges", cb.binning->edges()}, {"bin_count", cb.binning->bin_count()}};
    } else {
        j["binning"] = nullptr;
    }
    return j;
}

Codebook codebook_from_json(const json& j) {
    Codebook cb;
    cb.schema = schema_from_name(j.at("schema").get<std::string>());
    cb.rtu = encoder_from_json(j.at("rtu"));
    cb.points = encoder_from_json(j.at("points"));
    cb.channel = encoder_from_json(j.at("channel"));
    if (j.contains("binning") && !j.at("binning").is_null()) {
        cb.binning = TimeBinning::from_edges(
            j.at("binning").at("edges").get<std::vector<std::int64_t>>(),
            j.at("binning").at("bin_count").get<std::size_t>());
    }
    return cb;
}

json kruskal_to_json(const KruskalModel& m) {
    json j;
    j["shape"] = m.shape;
    j["gamma"] = std::vector<double>(m.gamma.data(), m.gamma.data() + m.gamma.size());
    json factors = json::array();
    for (const auto& f : m.factors) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(f.cols()));
            for (Eigen::Index c = 0; c < f.cols(); ++c) row[static_cast<std::size_t>(c)] = f(i, c);
            rows.push_back(row);
        }
        factors.push_back(std::move(rows));
    }
    j["factors"] = std::move(factors);
    return j;
}

KruskalModel kruskal_from_json(const json& j) {
    KruskalModel m;
    m.shape = j.at("shape").get<std::vector<std::size_t>>();
    auto gamma = j.at("gamma").get<std::vector<double>>();
    m.gamma = Eigen::Map<const Eigen::VectorXd>(gamma.data(), static_cast<Eigen::Index>(gamma.size()));
    for (const auto& rows : j.at("factors")) {
        if (rows.empty()) raise(ErrorCode::data, "model: empty factor matrix");
        const auto n = static_cast<Eigen::Index>(rows.size());
        const auto r = static_cast<Eigen::Index>(rows.front().size());
        Eigen::MatrixXd f(n, r);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto row = rows[static_cast<std::size_t>(i)].get<std::vector<double>>();
            if (static_cast<Eigen::Index>(row.size()) != r)
                raise(ErrorCode::data, "model: ragged factor matrix");
            for (Eigen::Index c = 0; c < r; ++c) f(i, c) = row[static_cast<std::size_t>(c)];
        }
        m.factors.push_back(std::move(f));
    }
    if (m.factors.size() != m.shape.size())
        raise(ErrorCode::data, "model: factor count does not match shape");
    return m;
}

json smoothed_to_json(const SmoothedModel& m) {
    return json{{"w1", m.w1},
                {"wr", m.wr},
                {"rank1", kruskal_to_json(m.rank1)},
                {"rank_r", kruskal_to_json(m.rank_r)}};
}

SmoothedModel smoothed_from_json(const json& j) {
    return fuse(kruskal_from_json(j.at("rank1")), kruskal_from_json(j.at("rank_r")),
                j.at("w1").get<double>(), j.at("wr").get<double>());
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(i, c);
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (j.empty()) raise(ErrorCode::data, "model: empty matrix");
    const auto n = static_cast<Eigen::Index>(j.size());
    const auto c = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(n, c);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto row = j[static_cast<std::size_t>(i)].get<std::vector<double>>();
        if (static_cast<Eigen::Index>(row.size()) != c) raise(ErrorCode::data, "model: ragged matrix");
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
    }
    return m;
}

} // namespace

void save_build(const TensorBuild& build, const std::string& dir) {
    const std::string tensor_file = "tensor.coo";
    build.tensor.save(dir + "/" + tensor_file);
    json j;
    j["format"] = "scadatd-build";
    j["version"] = 1;
    j["codebook"] = codebook_to_json(build.codebook);
    j["skips"] = {{"first_occurrence", build.skips.first_occurrence}, {"oov", build.skips.oov}};
    j["inflation_constant"] = build.inflation_constant;
    j["tensor_file"] = tensor_file;
    write_document(j, dir + "/build.json");
}

TensorBuild load_build(const std::string& dir) {
    json j = load_document(dir + "/build.json", "scadatd-build", 1);
    TensorBuild build;
    build.codebook = codebook_from_json(j.at("codebook"));
    build.skips.first_occurrence = j.at("skips").at("first_occurrence").get<std::size_t>();
    build.skips.oov = j.at("skips").at("oov").get<std::size_t>();
    build.inflation_constant = j.at("inflation_constant").get<long long>();
    build.tensor = SparseTensorCOO::load(dir + "/" + j.at("tensor_file").get<std::string>());
    if (build.tensor.shape() != build.codebook.shape())
        raise(ErrorCode::data, dir + ": tensor shape does not match its codebook");
    return build;
}

void save_detector(const Detector& detector, const std::string& path) {
    json j;
    j["format"] = "scadatd-detector";
    j["version"] = 1;
    if (const auto* c = std::get_if<CpaprDetector>(&detector)) {
        j["kind"] = "cpapr";
        j["codebook"] = codebook_to_json(c->codebook);
        j["rank"] = c->rank;
        j["final_objective"] = c->final_objective;
        j["model"] = smoothed_to_json(c->model);
    } else if (const auto* n = std::get_if<NmfDetector>(&detector)) {
        j["kind"] = "nmf";
        j["schema"] = matrix_schema_name(n->schema);
        j["rows"] = encoder_to_json(n->rows);
        j["cols"] = encoder_to_json(n->cols);
        j["inflation_constant"] = n->inflation_constant;
        j["final_objective"] = n->final_objective;
        j["model"] = smoothed_to_json(n->model.smoothed);
    } else {
        const auto& p = std::get<PcaDetector>(detector);
        j["kind"] = "pca";
        j["codebook"] = codebook_to_json(p.codebook);
        j["mean"] = std::vector<double>(p.model.mean.data(), p.model.mean.data() + p.model.mean.size());
        j["components"] = matrix_to_json(p.model.components);
        j["k"] = p.model.k;
        j["variance_target"] = p.model.variance_target;
        j["variance_captured"] = p.model.variance_captured;
    }
    write_document(j, path);
}

Detector load_detector(const std::string& path) {
    json j = load_document(path, "scadatd-detector", 1);
    const std::string kind = j.value("kind", "");
    try {
        if (kind == "cpapr") {
            CpaprDetector d;
            d.codebook = codebook_from_json(j.at("codebook"));
            d.rank = j.at("rank").get<std::size_t>();
            d.final_objective = j.at("final_objective").get<double>();
            d.model = smoothed_from_json(j.at("model"));
            if (d.model.shape() != d.codebook.shape())
                raise(ErrorCode::data, path + ": model shape does not match its codebook");
            return d;
        }
        if (kind == "nmf") {
            NmfDetector d;
            d.schema = matrix_schema_from_name(j.at("schema").get<std::string>());
            d.rows = encoder_from_json(j.at("rows"));
            d.cols = encoder_from_json(j.at("cols"));
            d.inflation_constant = j.at("inflation_constant").get<long long>();
            d.final_objective = j.at("final_objective").get<double>();
            d.model.smoothed = smoothed_from_json(j.at("model"));
            return d;
        }
        if (kind == "pca") {
            PcaDetector d;
            d.codebook = codebook_from_json(j.at("codebook"));
            auto mean = j.at("mean").get<std::vector<double>>();
            d.model.mean =
                Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
            d.model.components = matrix_from_json(j.at("components"));
            d.model.k = j.at("k").get<std::size_t>();
            d.model.variance_target = j.at("variance_target").get<double>();
            d.model.variance_captured = j.at("variance_captured").get<double>();
            return d;
        }
    } catch (const json::exception& e) {
        raise(ErrorCode::data, path + ": malformed detector document: " + e.what());
    }
    raise(ErrorCode::data, path + ": unknown detector kind '" + kind + "'");
}

void save_profile(const SystemProfile& profile, const std::string& path) {
    json j;
    j["format"] = "scadatd-profile";
    j["version"] = 1;
    json triples = json::array();
    for (const auto& t : profile.triples)
        triples.push_back({{"rtu", t.rtu}, {"points", t.points}, {"channel", t.channel}, {"count", t.count}});
    j["triples"] = std::move(triples);
    json gaps = json::object();
    for (const auto& [rtu, pool] : profile.gaps_by_rtu) gaps[rtu] = pool;
    j["gaps_by_rtu"] = std::move(gaps);
    write_document(j, path);
}

SystemProfile load_profile(const std::string& path) {
    json j = load_document(path, "scadatd-profile", 1);
    SystemProfile p;
    try {
        std::set<std::string> rtus, channels;
        std::set<int> points;
        for (const auto& t : j.at("triples")) {
            SystemProfile::TripleCount tc;
            tc.rtu = t.at("rtu").get<std::string>();
            tc.points = t.at("points").get<int>();
            tc.channel = t.at("channel").get<std::string>();
            tc.count = t.at("count").get<std::size_t>();
            if (tc.count == 0) raise(ErrorCode::data, path + ": triple with zero count");
            rtus.insert(tc.rtu);
            channels.insert(tc.channel);
            points.insert(tc.points);
            p.triples.push_back(std::move(tc));
        }
        if (p.triples.empty()) raise(ErrorCode::data, path + ": profile has no triples");
        std::sort(p.triples.begin(), p.triples.end(), [](const auto& a, const auto& b) {
            return std::tie(a.rtu, a.points, a.channel) < std::tie(b.rtu, b.points, b.channel);
        });
        p.rtus.assign(rtus.begin(), rtus.end());
        p.channels.assign(channels.begin(), channels.end());
        p.points_values.assign(points.begin(), points.end());
        for (const auto& [rtu, pool] : j.at("gaps_by_rtu").items()) {
            auto samples = pool.get<std::vector<std::int64_t>>();
            for (std::int64_t g : samples)
                if (g <= 0) raise(ErrorCode::data, path + ": non-positive gap sample for " + rtu);
            std::sort(samples.begin(), samples.end());
            p.all_gaps.insert(p.all_gaps.end(), samples.begin(), samples.end());
            p.gaps_by_rtu[rtu] = std::move(samples);
        }
        std::sort(p.all_gaps.begin(), p.all_gaps.end());
        if (p.all_gaps.empty()) raise(ErrorCode::data, path + ": profile has no gap samples");
    } catch (const json::exception& e) {
        raise(ErrorCode::data, path + ": malformed profile document: " + e.what());
    }
    return p;
}

void save_metrics(const EvaluationReport& report, const std::string& metrics_path,
                  const std::string& roc_csv_path, const std::string& pr_csv_path,
                  const std::string& model_tag) {
    json j;
    j["format"] = "scadatd-metrics";
    j["version"] = 1;
    if (!model_tag.empty()) j["model"] = model_tag;
    j["roc_auc"] = report.roc_auc;
    j["pr_auc"] = report.pr_auc;
    j["n_anomalous"] = report.n_anomalous;
    j["n_benign"] = report.n_benign;
    write_document(j, metrics_path);

    std::ofstream roc(roc_csv_path);
    if (!roc) raise(ErrorCode::io, "cannot open for writing: " + roc_csv_path);
    roc << "fpr,tpr\n";
    for (const auto& [fpr, tpr] : report.roc)
        roc << format_double(fpr) << ',' << format_double(tpr) << '\n';

    std::ofstream pr(pr_csv_path);
    if (!pr) raise(ErrorCode::io, "cannot open for writing: " + pr_csv_path);
    pr << "recall,precision\n";
    for (const auto& [recall, precision] : report.pr)
        pr << format_double(recall) << ',' << format_double(precision) << '\n';
}

void save_sweep(const SweepResult& sweep, const std::string& path) {
    json j;
    j["format"] = "scadatd-sweep";
    j["version"] = 1;
    j["best_rank"] = sweep.best_rank;
    json rows = json::array();
    for (const auto& [rank, auc] : sweep.pr_aucs) rows.push_back({{"rank", rank}, {"pr_auc", auc}});
    j["pr_aucs"] = std::move(rows);
    write_document(j, path);
}

void write_report(const std::vector<std::string>& metrics_paths, const std::string& out_path) {
    if (metrics_paths.empty()) raise(ErrorCode::invalid_argument, "report: no metrics files given");
    json entries = json::array();
    for (const auto& path : metrics_paths) {
        json m = load_document(path, "scadatd-metrics", 1);
        json e;
        e["file"] = path;
        if (m.contains("model")) e["model"] = m.at("model");
        e["roc_auc"] = m.at("roc_auc");
        e["pr_auc"] = m.at("pr_auc");
        e["n_anomalous"] = m.at("n_anomalous");
        e["n_benign"] = m.at("n_benign");
        entries.push_back(std::move(e));
    }
    json j;
    j["format"] = "scadatd-report";
    j["version"] = 1;
    j["entries"] = std::move(entries);
    write_document(j, out_path);
}

} // namespace scadatd
