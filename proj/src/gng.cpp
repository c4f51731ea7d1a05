#include "egokit/gng.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

#include "egokit/rng.hpp"

namespace egokit {

void GngParams::validate() const {
    if (max_nodes < 2) throw InvalidParams("gng: max_nodes must be >= 2");
    if (lambda_insert < 1) throw InvalidParams("gng: lambda_insert must be >= 1");
    if (!(eps_n > 0.0 && eps_b > eps_n && eps_b < 1.0)) {
        throw InvalidParams("gng: need 0 < eps_n < eps_b < 1");
    }
    if (max_age < 1) throw InvalidParams("gng: max_age must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParams("gng: alpha must be in (0,1)");
    if (!(d_decay > 0.0 && d_decay < 1.0)) throw InvalidParams("gng: d_decay must be in (0,1)");
    if (epochs < 1) throw InvalidParams("gng: epochs must be >= 1");
}

std::vector<int> GngGraph::neighbors(int id) const {
    std::vector<int> out;
    for (const auto& e : edges) {
        if (e.a == id) out.push_back(e.b);
        else if (e.b == id) out.push_back(e.a);
    }
    return out;
}

void regularize_covariance(Eigen::MatrixXd& cov) {
    const int d = static_cast<int>(cov.rows());
    const double scale = std::max(cov.trace() / d, 0.0);
    cov.diagonal().array() += 1e-6 * scale + 1e-12;
}

namespace {

// Mutable training state; compacted into a GngGraph at the end.
struct Trainer {
    struct Slot {
        Eigen::VectorXd pos;
        double error = 0.0;
        bool alive = false;
    };
    std::vector<Slot> slots;
    std::vector<GngEdge> edges;   // a < b over slot indices
    int alive_count = 0;

    int add_node(const Eigen::VectorXd& pos, double error) {
        slots.push_back({pos, error, true});
        ++alive_count;
        return static_cast<int>(slots.size()) - 1;
    }

    void connect(int a, int b) {
        if (a > b) std::swap(a, b);
        for (auto& e : edges) {
            if (e.a == a && e.b == b) {
                e.age = 0;
                return;
            }
        }
        edges.push_back({a, b, 0});
    }

    void disconnect(int a, int b) {
        if (a > b) std::swap(a, b);
        std::erase_if(edges, [&](const GngEdge& e) { return e.a == a && e.b == b; });
    }

    void age_edges_of(int id) {
        for (auto& e : edges) {
            if (e.a == id || e.b == id) ++e.age;
        }
    }

    void prune(int max_age) {
        std::erase_if(edges, [&](const GngEdge& e) { return e.age > max_age; });
        // Drop isolated nodes, never below two.
        for (std::size_t i = 0; i < slots.size() && alive_count > 2; ++i) {
            if (!slots[i].alive) continue;
            bool isolated = true;
            for (const auto& e : edges) {
                if (e.a == static_cast<int>(i) || e.b == static_cast<int>(i)) {
                    isolated = false;
                    break;
                }
            }
            if (isolated) {
                slots[i].alive = false;
                --alive_count;
            }
        }
    }

    // Two nearest live slots by squared distance, ties to the smaller index.
    std::pair<int, int> two_nearest(const Eigen::VectorXd& x) const {
        int s1 = -1, s2 = -1;
        double d1 = std::numeric_limits<double>::infinity();
        double d2 = d1;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (!slots[i].alive) continue;
            const double d = (slots[i].pos - x).squaredNorm();
            if (d < d1) {
                d2 = d1;
                s2 = s1;
                d1 = d;
                s1 = static_cast<int>(i);
            } else if (d < d2) {
                d2 = d;
                s2 = static_cast<int>(i);
            }
        }
        return {s1, s2};
    }

    std::vector<int> neighbor_slots(int id) const {
        std::vector<int> out;
        for (const auto& e : edges) {
            if (e.a == id) out.push_back(e.b);
            else if (e.b == id) out.push_back(e.a);
        }
        return out;
    }
};

void compute_node_stats(GngGraph& graph, const Eigen::MatrixXd& points) {
    const int n = graph.size();
    const int d = graph.dim;
    const auto assign = assign_nodes(graph, points, Exec::serial);

    std::vector<std::size_t> counts(n, 0);
    std::vector<Eigen::VectorXd> sums(n, Eigen::VectorXd::Zero(d));
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        counts[assign[i]] += 1;
        sums[assign[i]] += points.row(i).transpose();
    }
    std::vector<Eigen::MatrixXd> covs(n, Eigen::MatrixXd::Zero(d, d));
    std::vector<Eigen::VectorXd> means(n, Eigen::VectorXd::Zero(d));
    for (int j = 0; j < n; ++j) {
        if (counts[j] > 0) means[j] = sums[j] / static_cast<double>(counts[j]);
    }
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int j = assign[i];
        const Eigen::VectorXd c = points.row(i).transpose() - means[j];
        covs[j] += c * c.transpose();
    }
    for (int j = 0; j < n; ++j) {
        if (counts[j] > 0) covs[j] /= static_cast<double>(counts[j]);
    }

    for (int j = 0; j < n; ++j) {
        auto& node = graph.nodes[j];
        node.count = counts[j];
        if (counts[j] > 0) {
            node.mean = means[j];
            node.cov = covs[j];
        } else {
            // Unvisited node: isotropic covariance at the mean neighbor scale,
            // so every word stays evaluable by the filter.
            node.mean = node.centroid;
            double scale = 0.0;
            int used = 0;
            for (int nb : graph.neighbors(j)) {
                if (graph.nodes[nb].count > 0) {
                    scale += covs[nb].trace() / d;
                    ++used;
                }
            }
            if (used == 0) {
                Eigen::RowVectorXd gm = points.colwise().mean();
                scale = (points.rowwise() - gm).squaredNorm() /
                        static_cast<double>(points.rows() * d);
            } else {
                scale /= used;
            }
            node.cov = scale * Eigen::MatrixXd::Identity(d, d);
        }
        regularize_covariance(node.cov);
        Eigen::LLT<Eigen::MatrixXd> llt(node.cov);
        if (llt.info() != Eigen::Success) {
            throw NumericalFailure("gng: node covariance not positive definite");
        }
    }
}

}  // namespace

GngGraph train_gng(const Eigen::MatrixXd& points, const GngParams& params) {
    params.validate();
    const Eigen::Index n_samples = points.rows();
    if (n_samples < 2) throw TooFewSamples("gng needs at least 2 samples");
    const int d = static_cast<int>(points.cols());

    Trainer tr;
    Rng rng(params.seed);

    // Two seed nodes at distinct samples when possible; coincident centroids
    // are valid for degenerate (all-identical) data.
    const auto i0 = static_cast<Eigen::Index>(rng.below(n_samples));
    auto i1 = static_cast<Eigen::Index>(rng.below(n_samples));
    for (Eigen::Index probe = 0; probe < n_samples; ++probe) {
        const Eigen::Index cand = (i1 + probe) % n_samples;
        if (cand != i0 && points.row(cand) != points.row(i0)) {
            i1 = cand;
            break;
        }
    }
    if (i1 == i0) i1 = (i0 + 1) % n_samples;
    tr.add_node(points.row(i0).transpose(), 0.0);
    tr.add_node(points.row(i1).transpose(), 0.0);
    tr.connect(0, 1);

    long step = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        for (Eigen::Index i = 0; i < n_samples; ++i) {
            ++step;
            const Eigen::VectorXd x = points.row(i).transpose();
            const auto [s1, s2] = tr.two_nearest(x);

            tr.age_edges_of(s1);
            tr.slots[s1].error += (tr.slots[s1].pos - x).squaredNorm();
            tr.slots[s1].pos += params.eps_b * (x - tr.slots[s1].pos);
            for (int nb : tr.neighbor_slots(s1)) {
                tr.slots[nb].pos += params.eps_n * (x - tr.slots[nb].pos);
            }
            tr.connect(s1, s2);
            tr.prune(params.max_age);

            if (step % params.lambda_insert == 0 && tr.alive_count < params.max_nodes) {
                // Split between the worst node and its worst neighbor.
                int q = -1;
                double qe = -1.0;
                for (std::size_t j = 0; j < tr.slots.size(); ++j) {
                    if (tr.slots[j].alive && tr.slots[j].error > qe) {
                        qe = tr.slots[j].error;
                        q = static_cast<int>(j);
                    }
                }
                int f = -1;
                double fe = -1.0;
                for (int nb : tr.neighbor_slots(q)) {
                    if (tr.slots[nb].error > fe) {
                        fe = tr.slots[nb].error;
                        f = nb;
                    }
                }
                if (f >= 0) {
                    tr.slots[q].error *= params.alpha;
                    tr.slots[f].error *= params.alpha;
                    const int r = tr.add_node(
                        0.5 * (tr.slots[q].pos + tr.slots[f].pos), tr.slots[q].error);
                    tr.disconnect(q, f);
                    tr.connect(q, r);
                    tr.connect(r, f);
                }
            }
            for (auto& slot : tr.slots) {
                if (slot.alive) slot.error *= params.d_decay;
            }
        }
    }

    // Compact to dense ids in slot order.
    GngGraph graph;
    graph.dim = d;
    graph.params = params;
    std::vector<int> remap(tr.slots.size(), -1);
    for (std::size_t i = 0; i < tr.slots.size(); ++i) {
        if (!tr.slots[i].alive) continue;
        remap[i] = graph.size();
        GngNode node;
        node.centroid = tr.slots[i].pos;
        node.error = tr.slots[i].error;
        graph.nodes.push_back(std::move(node));
    }
    for (const auto& e : tr.edges) {
        if (remap[e.a] < 0 || remap[e.b] < 0) continue;
        int a = remap[e.a], b = remap[e.b];
        if (a > b) std::swap(a, b);
        graph.edges.push_back({a, b, e.age});
    }
    std::sort(graph.edges.begin(), graph.edges.end(), [](const GngEdge& x, const GngEdge& y) {
        return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });

    compute_node_stats(graph, points);
    return graph;
}

std::pair<int, double> nearest_node(const GngGraph& graph,
                                    const Eigen::Ref<const Eigen::VectorXd>& point) {
    if (point.size() != graph.dim) {
        throw DimensionMismatch("nearest_node: point dim " + std::to_string(point.size()) +
                                " vs graph dim " + std::to_string(graph.dim));
    }
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < graph.size(); ++j) {
        const double d = (graph.nodes[j].centroid - point).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return {best, best_d};
}

std::vector<int> assign_nodes(const GngGraph& graph, const Eigen::MatrixXd& points,
                              Exec exec) {
    if (points.cols() != graph.dim) {
        throw DimensionMismatch("assign_nodes: point dim does not match graph");
    }
    const Eigen::Index n = points.rows();
    std::vector<int> out(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) {
            out[i] = nearest_node(graph, points.row(i).transpose()).first;
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            out[i] = nearest_node(graph, points.row(i).transpose()).first;
        }
    }
    return out;
}

double quantization_error(const GngGraph& graph, const Eigen::MatrixXd& points, Exec exec) {
    if (points.cols() != graph.dim) {
        throw DimensionMismatch("quantization_error: point dim does not match graph");
    }
    const Eigen::Index n = points.rows();
    if (n == 0) throw TooFewSamples("quantization_error needs at least 1 point");
    std::vector<double> dist(n);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i) {
            dist[i] = nearest_node(graph, points.row(i).transpose()).second;
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            dist[i] = nearest_node(graph, points.row(i).transpose()).second;
        }
    }
    // Serial sum keeps the result identical across thread counts.
    double total = 0.0;
    for (double v : dist) total += v;
    return total / static_cast<double>(n);
}

}  // namespace egokit
