#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "egokit/errors.hpp"
#include "egokit/parallel.hpp"

namespace egokit {

// Growing neural gas hyperparameters (Fritzke's algorithm).
struct GngParams {
    int max_nodes = 10;        // node budget per graph
    int lambda_insert = 100;   // samples between node insertions
    double eps_b = 0.2;        // winner learning rate
    double eps_n = 0.006;      // neighbor learning rate
    int max_age = 50;          // edge age limit
    double alpha = 0.5;        // error decay on split
    double d_decay = 0.995;    // global error decay per sample
    int epochs = 5;            // passes over the data
    std::uint64_t seed = 0;

    void validate() const;
};

struct GngNode {
    Eigen::VectorXd centroid;
    double error = 0.0;
    // Post-training statistics over assigned samples.
    std::size_t count = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;      // regularized, positive definite
};

struct GngEdge {
    int a = 0;   // a < b
    int b = 0;
    int age = 0;
};

// Trained graph; node ids are dense 0..size()-1. Immutable after training.
struct GngGraph {
    int dim = 0;
    std::vector<GngNode> nodes;
    std::vector<GngEdge> edges;   // normalized a < b, sorted
    GngParams params;             // echoed for provenance

    int size() const { return static_cast<int>(nodes.size()); }
    std::vector<int> neighbors(int id) const;
};

// Adds 1e-6 * (trace/dim) * I plus a tiny absolute floor, in place. Keeps
// every covariance factorizable downstream.
void regularize_covariance(Eigen::MatrixXd& cov);

// Trains one GNG. Deterministic given the seed: samples are visited
// sequentially each epoch, the seed only picks the two initial centroids.
GngGraph train_gng(const Eigen::MatrixXd& points, const GngParams& params);

// Nearest live node by squared Euclidean distance; ties go to the smaller id.
std::pair<int, double> nearest_node(const GngGraph& graph,
                                    const Eigen::Ref<const Eigen::VectorXd>& point);

// Batch kernels (serial reference / OpenMP, identical output).
std::vector<int> assign_nodes(const GngGraph& graph, const Eigen::MatrixXd& points,
                              Exec exec = Exec::parallel);
double quantization_error(const GngGraph& graph, const Eigen::MatrixXd& points,
                          Exec exec = Exec::parallel);

}  // namespace egokit
