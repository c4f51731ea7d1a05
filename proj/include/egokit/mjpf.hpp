#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "egokit/anomaly.hpp"
#include "egokit/parallel.hpp"
#include "egokit/rng.hpp"
#include "egokit/signal.hpp"
#include "egokit/vocabulary.hpp"

namespace egokit {

// Everything the filter needs for one feature-case: vocabulary, word
// transition model, per-word linear dynamics, normalization, and the
// observation model z = [I 0] x + noise with covariance R.
struct ModelBundle {
    std::string feature_id;
    std::vector<std::string> channels;
    double dt = 0.0;
    int order = 0;
    int dim = 0;
    Scaler scaler;
    Vocabulary vocab;
    TransitionModel transitions;
    std::vector<WordDynamics> dynamics;   // by word id
    Eigen::MatrixXd obs_cov;              // R, dim x dim, positive definite

    // Derived at finalize():
    std::vector<Eigen::VectorXd> transition_cdf;  // per-row cumulative rows
    double log_det_obs_cov = 0.0;

    int state_dim() const { return dim * (order + 1); }

    // Validates shapes/PD-ness, derives word dynamics if empty, builds CDFs.
    void finalize();
};

struct Particle {
    int word = 0;
    Eigen::VectorXd mean;    // generalized state, normalized units
    Eigen::MatrixXd cov;
    double weight = 0.0;
};

struct StepResult {
    int tick = 0;
    double t = 0.0;
    double theta = 0.0;                 // abnormality in [0,1]
    int map_word = 0;                   // highest posterior-mass word
    Eigen::VectorXd posterior_mean;     // normalized generalized state
    double ess = 0.0;
    bool resampled = false;
    bool likelihood_underflow = false;
    std::vector<Particle> mixture;      // predicted mixture; kept on request only
};

struct MjpfOptions {
    int particles = 200;
    std::uint64_t seed = 0;
    bool keep_mixture = false;
    Exec exec = Exec::parallel;
};

// Markov Jump Particle Filter: a particle set over word hypotheses where each
// particle carries a Kalman-filtered Gaussian in generalized-state space.
// Per-tick use: predict() then update(). Deterministic given the seed and
// independent of thread count (RNG draws and weight reductions are serial,
// only the per-particle matrix work is parallel).
class MarkovJumpFilter {
public:
    MarkovJumpFilter(const ModelBundle& model, int n_particles,
                     const Eigen::VectorXd& z0_raw, std::uint64_t seed,
                     Exec exec = Exec::parallel);

    // Samples each particle's next word from its transition row and applies
    // the word's local linear dynamics to mean and covariance.
    void predict();

    // Kalman measurement update, weight update with likelihood flooring,
    // Hellinger scoring against the evidence N(z, R), ESS-triggered
    // systematic resampling.
    StepResult update(const Eigen::VectorXd& z_raw, int tick, double t,
                      bool keep_mixture = false);

    const std::vector<Particle>& particles() const { return particles_; }
    double effective_sample_size() const;

private:
    const ModelBundle& model_;
    Exec exec_;
    Rng rng_;
    std::vector<Particle> particles_;
    std::vector<Particle> scratch_;        // resampling buffer
    std::vector<double> uniforms_;         // per-particle draws for word jumps
    std::vector<double> pre_weights_;      // normalized weights before update
    std::vector<double> theta_i_;
    std::vector<double> loglik_;
    std::vector<double> word_mass_;
    bool predicted_ = false;

    // Preallocated per-thread temporaries; the per-particle loops stay
    // allocation free.
    struct Workspace {
        Eigen::MatrixXd s, gain, joseph, tmp, gain_r, p00;
        Eigen::VectorXd innov;
        Eigen::LLT<Eigen::MatrixXd> llt_s, llt_p;
        Workspace(int state_dim, int obs_dim)
            : s(obs_dim, obs_dim),
              gain(state_dim, obs_dim),
              joseph(state_dim, state_dim),
              tmp(state_dim, state_dim),
              gain_r(state_dim, obs_dim),
              p00(obs_dim, obs_dim),
              innov(obs_dim),
              llt_s(obs_dim),
              llt_p(obs_dim) {}
    };
    std::vector<Workspace> workspaces_;    // one per thread

    void predict_particle(Particle& p, double u, Workspace& ws);
    void update_particle(Particle& p, const Eigen::VectorXd& z, Workspace& ws,
                         double& theta_out, double& loglik_out);
    void systematic_resample();
};

// Runs the filter over a whole series: the first tick initializes, every
// later tick yields one StepResult. The model's channels are selected from
// the series by name.
std::vector<StepResult> run_sequence(const ModelBundle& model, const SensorSeries& series,
                                     const MjpfOptions& options);

struct TrainConfig {
    GngParams gng;
    int order = 1;                    // L
    double r_std = 0.05;              // observation noise std, normalized units
    double transition_alpha = -1.0;   // < 0: default_transition_alpha
};

// Full learning pipeline for one feature-case: select channels, fit the
// scaler, build generalized states, train the alphabets, learn transitions
// and word dynamics.
ModelBundle train_model(const SensorSeries& training, const FeatureCase& fc,
                        const TrainConfig& config);

}  // namespace egokit
