#pragma once

#include <Eigen/Dense>
#include <vector>

#include "egokit/gng.hpp"
#include "egokit/signal.hpp"

namespace egokit {

// One GNG alphabet per derivative order plus the word dictionary: the full
// Cartesian product of alphabet node ids, indexed row-major (level 0 varies
// slowest).
struct Vocabulary {
    std::vector<GngGraph> alphabets;   // order+1 graphs
    std::vector<std::uint8_t> observed;  // by word id; words seen in training

    int order() const { return static_cast<int>(alphabets.size()) - 1; }
    int dim() const { return alphabets.empty() ? 0 : alphabets.front().dim; }
    int state_dim() const { return dim() * static_cast<int>(alphabets.size()); }

    std::vector<int> sizes() const;
    int word_count() const;

    int word_id(const std::vector<int>& tuple) const;
    std::vector<int> word_tuple(int word) const;
};

// Row-stochastic first-order Markov model over words.
struct TransitionModel {
    Eigen::MatrixXd matrix;   // word_count x word_count, rows sum to 1
    double alpha = 0.0;       // Laplace smoothing actually used
};

// Local linear model of one word: constant drift at the derivative-level
// centroids, process noise assembled block-diagonally from the member nodes.
struct WordDynamics {
    // Stacked centroids of levels 1..L (empty when order==0); the first
    // `dim` entries are the order-1 drift proper.
    Eigen::VectorXd drift;
    Eigen::VectorXd emission;     // order-0 node centroid
    Eigen::MatrixXd process_cov;  // state_dim x state_dim, positive definite
};

// Trains order+1 GNGs (one per derivative block) and marks the words observed
// in the training encoding.
Vocabulary build_vocabulary(const GeneralizedSeries& gen, const GngParams& params);

// Per tick, assigns every derivative block to its nearest alphabet node and
// maps the tuple to a word id.
std::vector<int> encode(const GeneralizedSeries& gen, const Vocabulary& vocab,
                        Exec exec = Exec::parallel);

// matrix[i][j] = (count(i->j) + alpha) / (count(i->*) + alpha*|words|);
// rows never visited are uniform.
TransitionModel learn_transitions(const std::vector<int>& seq, const Vocabulary& vocab,
                                  double alpha);

// Default per-cell Laplace alpha. The row-level smoothing mass stays at about
// 5% of the mean row count, so rarely-visited regimes keep their structure.
double default_transition_alpha(std::size_t seq_len, int word_count);

WordDynamics word_dynamics(const Vocabulary& vocab, int word);

}  // namespace egokit
