#include "egokit/vocabulary.hpp"

#include <algorithm>
#include <exception>

namespace egokit {

std::vector<int> Vocabulary::sizes() const {
    std::vector<int> out;
    out.reserve(alphabets.size());
    for (const auto& g : alphabets) out.push_back(g.size());
    return out;
}

int Vocabulary::word_count() const {
    int n = 1;
    for (const auto& g : alphabets) n *= g.size();
    return n;
}

int Vocabulary::word_id(const std::vector<int>& tuple) const {
    if (tuple.size() != alphabets.size()) {
        throw DimensionMismatch("word tuple arity does not match alphabet count");
    }
    int id = 0;
    for (std::size_t l = 0; l < tuple.size(); ++l) {
        const int n = alphabets[l].size();
        if (tuple[l] < 0 || tuple[l] >= n) throw UnknownWord("node id out of range");
        id = id * n + tuple[l];
    }
    return id;
}

std::vector<int> Vocabulary::word_tuple(int word) const {
    if (word < 0 || word >= word_count()) {
        throw UnknownWord("word id " + std::to_string(word) + " out of range");
    }
    std::vector<int> tuple(alphabets.size());
    for (int l = static_cast<int>(alphabets.size()) - 1; l >= 0; --l) {
        const int n = alphabets[l].size();
        tuple[l] = word % n;
        word /= n;
    }
    return tuple;
}

Vocabulary build_vocabulary(const GeneralizedSeries& gen, const GngParams& params) {
    const int levels = gen.order + 1;
    Vocabulary vocab;
    vocab.alphabets.resize(levels);

    // One GNG per derivative block; independent trainings, safe to run
    // side by side. Exceptions must not escape the omp region.
    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(dynamic)
    for (int l = 0; l < levels; ++l) {
        try {
            GngParams p = params;
            p.seed = params.seed + static_cast<std::uint64_t>(l);
            vocab.alphabets[l] = train_gng(gen.block(l), p);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    vocab.observed.assign(vocab.word_count(), 0);
    for (int w : encode(gen, vocab, Exec::serial)) vocab.observed[w] = 1;
    return vocab;
}

std::vector<int> encode(const GeneralizedSeries& gen, const Vocabulary& vocab, Exec exec) {
    const int levels = vocab.order() + 1;
    const int d = vocab.dim();
    if (gen.dim != d || gen.order != vocab.order()) {
        throw DimensionMismatch("generalized series does not match vocabulary layout");
    }
    const Eigen::Index k = gen.states.rows();
    std::vector<int> seq(k);

    auto encode_tick = [&](Eigen::Index i) {
        int id = 0;
        for (int l = 0; l < levels; ++l) {
            const auto& g = vocab.alphabets[l];
            const int node =
                nearest_node(g, gen.states.row(i).segment(l * d, d).transpose()).first;
            id = id * g.size() + node;
        }
        return id;
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < k; ++i) seq[i] = encode_tick(i);
    } else {
        for (Eigen::Index i = 0; i < k; ++i) seq[i] = encode_tick(i);
    }
    return seq;
}

double default_transition_alpha(std::size_t seq_len, int word_count) {
    const double w = static_cast<double>(word_count);
    return std::max(0.05 * static_cast<double>(seq_len) / (w * w), 1e-3);
}

TransitionModel learn_transitions(const std::vector<int>& seq, const Vocabulary& vocab,
                                  double alpha) {
    if (seq.size() < 2) throw SequenceTooShort("need at least 2 ticks to learn transitions");
    if (alpha < 0.0) throw InvalidParams("transition alpha must be >= 0");
    const int w = vocab.word_count();

    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(w, w);
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (seq[i] < 0 || seq[i] >= w || seq[i + 1] < 0 || seq[i + 1] >= w) {
            throw UnknownWord("encoded sequence contains an out-of-range word");
        }
        counts(seq[i], seq[i + 1]) += 1.0;
    }

    TransitionModel model;
    model.alpha = alpha;
    model.matrix.resize(w, w);
    const double uniform = 1.0 / static_cast<double>(w);
    for (int i = 0; i < w; ++i) {
        const double row_total = counts.row(i).sum();
        if (row_total == 0.0 && alpha == 0.0) {
            model.matrix.row(i).setConstant(uniform);
        } else {
            model.matrix.row(i) =
                (counts.row(i).array() + alpha) / (row_total + alpha * w);
        }
    }
    return model;
}

WordDynamics word_dynamics(const Vocabulary& vocab, int word) {
    const auto tuple = vocab.word_tuple(word);   // validates the id
    const int d = vocab.dim();
    const int levels = vocab.order() + 1;

    WordDynamics dyn;
    dyn.emission = vocab.alphabets[0].nodes[tuple[0]].centroid;
    if (levels > 1) {
        dyn.drift.resize(d * (levels - 1));
        for (int l = 1; l < levels; ++l) {
            dyn.drift.segment((l - 1) * d, d) = vocab.alphabets[l].nodes[tuple[l]].centroid;
        }
    }
    dyn.process_cov = Eigen::MatrixXd::Zero(d * levels, d * levels);
    for (int l = 0; l < levels; ++l) {
        dyn.process_cov.block(l * d, l * d, d, d) =
            vocab.alphabets[l].nodes[tuple[l]].cov;
    }
    return dyn;
}

}  // namespace egokit
