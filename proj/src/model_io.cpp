#include "egokit/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace egokit {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const auto rows = j.size();
    const auto cols = rows == 0 ? 0 : j[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j[r].size() != cols) throw Error("model json: ragged matrix");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("cannot rename into '" + path + "': " + ec.message());
    }
}

double round6(double v) {
    if (!std::isfinite(v)) return v;
    return std::round(v * 1e6) / 1e6;
}

}  // namespace

json gng_to_json(const GngGraph& graph) {
    json j;
    j["dim"] = graph.dim;
    j["params"] = {{"max_nodes", graph.params.max_nodes},
                   {"lambda_insert", graph.params.lambda_insert},
                   {"eps_b", graph.params.eps_b},
                   {"eps_n", graph.params.eps_n},
                   {"max_age", graph.params.max_age},
                   {"alpha", graph.params.alpha},
                   {"d_decay", graph.params.d_decay},
                   {"epochs", graph.params.epochs},
                   {"seed", graph.params.seed}};
    j["nodes"] = json::array();
    for (const auto& n : graph.nodes) {
        j["nodes"].push_back({{"centroid", vec_to_json(n.centroid)},
                              {"error", n.error},
                              {"count", n.count},
                              {"mean", vec_to_json(n.mean)},
                              {"cov", mat_to_json(n.cov)}});
    }
    j["edges"] = json::array();
    for (const auto& e : graph.edges) j["edges"].push_back({e.a, e.b, e.age});
    return j;
}

GngGraph gng_from_json(const json& j) {
    GngGraph g;
    g.dim = j.at("dim").get<int>();
    const auto& p = j.at("params");
    g.params.max_nodes = p.at("max_nodes").get<int>();
    g.params.lambda_insert = p.at("lambda_insert").get<int>();
    g.params.eps_b = p.at("eps_b").get<double>();
    g.params.eps_n = p.at("eps_n").get<double>();
    g.params.max_age = p.at("max_age").get<int>();
    g.params.alpha = p.at("alpha").get<double>();
    g.params.d_decay = p.at("d_decay").get<double>();
    g.params.epochs = p.at("epochs").get<int>();
    g.params.seed = p.at("seed").get<std::uint64_t>();
    for (const auto& nj : j.at("nodes")) {
        GngNode n;
        n.centroid = vec_from_json(nj.at("centroid"));
        n.error = nj.at("error").get<double>();
        n.count = nj.at("count").get<std::size_t>();
        n.mean = vec_from_json(nj.at("mean"));
        n.cov = mat_from_json(nj.at("cov"));
        g.nodes.push_back(std::move(n));
    }
    for (const auto& ej : j.at("edges")) {
        g.edges.push_back({ej[0].get<int>(), ej[1].get<int>(), ej[2].get<int>()});
    }
    return g;
}

json model_to_json(const ModelBundle& model, const Provenance& prov) {
    json j;
    j["format_version"] = 1;
    j["feature_id"] = model.feature_id;
    j["channels"] = model.channels;
    j["dt"] = model.dt;
    j["order"] = model.order;
    j["dim"] = model.dim;
    j["scaler"] = {{"mean", vec_to_json(model.scaler.mean)},
                   {"std", vec_to_json(model.scaler.std)}};
    j["alphabets"] = json::array();
    for (const auto& g : model.vocab.alphabets) j["alphabets"].push_back(gng_to_json(g));
    json observed = json::array();
    for (std::size_t w = 0; w < model.vocab.observed.size(); ++w) {
        if (model.vocab.observed[w]) observed.push_back(w);
    }
    j["observed_words"] = std::move(observed);
    j["transition"] = {{"alpha", model.transitions.alpha},
                       {"matrix", mat_to_json(model.transitions.matrix)}};
    j["word_dynamics"] = json::array();
    for (const auto& d : model.dynamics) {
        j["word_dynamics"].push_back({{"drift", vec_to_json(d.drift)},
                                      {"emission", vec_to_json(d.emission)},
                                      {"process_cov", mat_to_json(d.process_cov)}});
    }
    j["observation_cov"] = mat_to_json(model.obs_cov);
    j["provenance"] = {{"seed", prov.seed},
                       {"data_hash", prov.data_hash},
                       {"trained_ticks", prov.trained_ticks}};
    return j;
}

ModelBundle model_from_json(const json& j) {
    if (j.at("format_version").get<int>() != 1) {
        throw Error("unsupported model format version");
    }
    ModelBundle m;
    m.feature_id = j.at("feature_id").get<std::string>();
    m.channels = j.at("channels").get<std::vector<std::string>>();
    m.dt = j.at("dt").get<double>();
    m.order = j.at("order").get<int>();
    m.dim = j.at("dim").get<int>();
    m.scaler.mean = vec_from_json(j.at("scaler").at("mean"));
    m.scaler.std = vec_from_json(j.at("scaler").at("std"));
    for (const auto& gj : j.at("alphabets")) {
        m.vocab.alphabets.push_back(gng_from_json(gj));
    }
    m.vocab.observed.assign(m.vocab.word_count(), 0);
    for (const auto& w : j.at("observed_words")) {
        m.vocab.observed.at(w.get<std::size_t>()) = 1;
    }
    m.transitions.alpha = j.at("transition").at("alpha").get<double>();
    m.transitions.matrix = mat_from_json(j.at("transition").at("matrix"));
    for (const auto& dj : j.at("word_dynamics")) {
        WordDynamics d;
        d.drift = vec_from_json(dj.at("drift"));
        d.emission = vec_from_json(dj.at("emission"));
        d.process_cov = mat_from_json(dj.at("process_cov"));
        m.dynamics.push_back(std::move(d));
    }
    m.finalize();
    return m;
}

void save_model(const std::string& path, const ModelBundle& model, const Provenance& prov) {
    atomic_write(path, model_to_json(model, prov).dump(1) + "\n");
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model '" + path + "'");
    json j;
    in >> j;
    return model_from_json(j);
}

void write_series_csv(const std::string& path, const SensorSeries& series) {
    std::ostringstream out;
    out << "t";
    for (const auto& c : series.channels) out << ',' << c;
    out << '\n';
    for (std::size_t k = 0; k < series.ticks(); ++k) {
        out << format_full(series.timestamps[k]);
        for (Eigen::Index c = 0; c < series.values.cols(); ++c) {
            out << ',' << format_full(series.values(k, c));
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void write_gt_csv(const std::string& path, const std::vector<double>& timestamps,
                  const GroundTruth& gt) {
    if (timestamps.size() != gt.size()) {
        throw LengthMismatch("ground truth and timestamps disagree");
    }
    std::ostringstream out;
    out << "t,class,label\n";
    for (std::size_t k = 0; k < gt.size(); ++k) {
        out << format_full(timestamps[k]) << ',' << to_string(gt.classes[k]) << ','
            << (is_abnormal(gt.classes[k]) ? 1 : 0) << '\n';
    }
    atomic_write(path, out.str());
}

GroundTruth read_gt_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open ground truth '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty ground-truth file");
    GroundTruth gt;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw RaggedRow("ground truth line " + std::to_string(line_no));
        }
        gt.classes.push_back(gt_class_from_string(line.substr(c1 + 1, c2 - c1 - 1)));
    }
    return gt;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
    std::ostringstream out;
    out << "k,t,theta,map_word\n";
    for (const auto& r : rows) {
        out << r.k << ',' << format_full(r.t) << ',' << format_full(r.theta) << ','
            << r.map_word << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty trace file");
    std::vector<TraceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        TraceRow r;
        if (std::sscanf(line.c_str(), "%d,%lf,%lf,%d", &r.k, &r.t, &r.theta, &r.map_word) != 4) {
            throw RaggedRow("bad trace row: " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

json report_to_json(const std::vector<EvalReport>& ranking, int smooth_window) {
    json j;
    j["format_version"] = 1;
    j["smoothing_window"] = smooth_window;
    j["ranking"] = json::array();
    for (const auto& r : ranking) j["ranking"].push_back(r.feature_id);

    std::vector<const EvalReport*> by_id;
    for (const auto& r : ranking) by_id.push_back(&r);
    std::sort(by_id.begin(), by_id.end(), [](const EvalReport* a, const EvalReport* b) {
        return a->feature_id < b->feature_id;
    });

    j["features"] = json::array();
    for (const auto* r : by_id) {
        json roc = json::array();
        for (const auto& p : r->roc) {
            roc.push_back({round6(p.threshold), round6(p.tpr), round6(p.fpr)});
        }
        j["features"].push_back({{"id", r->feature_id},
                                 {"auc", round6(r->auc)},
                                 {"best_acc", round6(r->best_acc)},
                                 {"threshold", round6(r->best_threshold)},
                                 {"roc", std::move(roc)}});
    }
    return j;
}

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& roc) {
    std::ostringstream out;
    out << "threshold,tpr,fpr\n";
    for (const auto& p : roc) {
        out << format_full(p.threshold) << ',' << format_full(p.tpr) << ','
            << format_full(p.fpr) << '\n';
    }
    atomic_write(path, out.str());
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for hashing");
    std::uint64_t h = 14695981039346656037ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const auto n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string fnv1a_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace egokit
