#include "egokit/mjpf.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <exception>

namespace egokit {

namespace {

constexpr double kLikelihoodFloor = 1e-300;
const double kLog2Pi = std::log(2.0 * M_PI);

}  // namespace

void ModelBundle::finalize() {
    if (dim <= 0 || order < 0) throw InvalidParams("model: bad dimensions");
    if (vocab.dim() != dim || vocab.order() != order) {
        throw DimensionMismatch("model: vocabulary does not match dimensions");
    }
    if (scaler.dim() != dim) throw DimensionMismatch("model: scaler does not match channels");
    const int words = vocab.word_count();
    if (transitions.matrix.rows() != words || transitions.matrix.cols() != words) {
        throw DimensionMismatch("model: transition matrix shape");
    }
    if (obs_cov.rows() != dim || obs_cov.cols() != dim) {
        throw DimensionMismatch("model: observation covariance shape");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(obs_cov);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("model: observation covariance not positive definite");
    }
    log_det_obs_cov = 2.0 * llt.matrixLLT().diagonal().array().log().sum();

    if (dynamics.empty()) {
        dynamics.reserve(words);
        for (int w = 0; w < words; ++w) dynamics.push_back(word_dynamics(vocab, w));
    }
    if (static_cast<int>(dynamics.size()) != words) {
        throw DimensionMismatch("model: word dynamics count");
    }

    transition_cdf.resize(words);
    for (int i = 0; i < words; ++i) {
        Eigen::VectorXd cdf(words);
        double run = 0.0;
        for (int j = 0; j < words; ++j) {
            run += transitions.matrix(i, j);
            cdf[j] = run;
        }
        cdf[words - 1] = 1.0;
        transition_cdf[i] = std::move(cdf);
    }
}

MarkovJumpFilter::MarkovJumpFilter(const ModelBundle& model, int n_particles,
                                   const Eigen::VectorXd& z0_raw, std::uint64_t seed,
                                   Exec exec)
    : model_(model), exec_(exec), rng_(seed) {
    if (n_particles < 1) throw InvalidParams("mjpf: need at least 1 particle");
    if (z0_raw.size() != model.dim) {
        throw DimensionMismatch("mjpf: first observation does not match model channels");
    }
    const int state_dim = model.state_dim();
    const int d = model.dim;

    // Generalized state from the first observation, zero derivatives.
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(state_dim);
    x0.head(d) = model.scaler.apply_row(z0_raw);
    std::vector<int> tuple(model.order + 1);
    for (int l = 0; l <= model.order; ++l) {
        tuple[l] = nearest_node(model.vocab.alphabets[l], x0.segment(l * d, d)).first;
    }
    const int word0 = model.vocab.word_id(tuple);

    Particle proto;
    proto.word = word0;
    proto.mean = x0;
    proto.cov = model.dynamics[word0].process_cov;
    proto.weight = 1.0 / static_cast<double>(n_particles);
    particles_.assign(n_particles, proto);
    scratch_ = particles_;

    uniforms_.resize(n_particles);
    pre_weights_.resize(n_particles);
    theta_i_.resize(n_particles);
    loglik_.resize(n_particles);
    word_mass_.resize(model.vocab.word_count());
    workspaces_.assign(std::max(1, max_threads()), Workspace(state_dim, d));
}

void MarkovJumpFilter::predict_particle(Particle& p, double u, Workspace& ws) {
    const auto& cdf = model_.transition_cdf[p.word];
    const auto* begin = cdf.data();
    const auto* end = cdf.data() + cdf.size();
    int next = static_cast<int>(std::upper_bound(begin, end, u) - begin);
    if (next >= static_cast<int>(cdf.size())) next = static_cast<int>(cdf.size()) - 1;

    const auto& dyn = model_.dynamics[next];
    const int d = model_.dim;
    const double dt = model_.dt;

    // A = [[I, dt*I, 0...], [0 ...]]: only the order-0 block survives, the
    // derivative blocks are regime constants reset to the word centroids.
    if (model_.order >= 1) {
        ws.p00 = p.cov.topLeftCorner(d, d) +
                 dt * (p.cov.block(0, d, d, d) + p.cov.block(d, 0, d, d)) +
                 dt * dt * p.cov.block(d, d, d, d);
        p.mean.head(d) += dt * dyn.drift.head(d);
        p.mean.tail(p.mean.size() - d) = dyn.drift;
    } else {
        ws.p00 = p.cov.topLeftCorner(d, d);
    }
    p.cov.setZero();
    p.cov.topLeftCorner(d, d) = ws.p00;
    p.cov += dyn.process_cov;
    p.word = next;
}

void MarkovJumpFilter::update_particle(Particle& p, const Eigen::VectorXd& z, Workspace& ws,
                                       double& theta_out, double& loglik_out) {
    const int d = model_.dim;

    ws.p00 = p.cov.topLeftCorner(d, d);
    ws.s = ws.p00 + model_.obs_cov;
    ws.llt_s.compute(ws.s);
    if (ws.llt_s.info() != Eigen::Success) {
        ws.s.diagonal().array() += 1e-9 * std::max(ws.s.trace() / d, 1.0);
        ws.llt_s.compute(ws.s);
        if (ws.llt_s.info() != Eigen::Success) {
            throw NumericalFailure("mjpf: innovation covariance not positive definite");
        }
    }
    const double log_det_s = 2.0 * ws.llt_s.matrixLLT().diagonal().array().log().sum();

    ws.innov = z - p.mean.head(d);
    const double maha = ws.innov.dot(ws.llt_s.solve(ws.innov));
    loglik_out = -0.5 * (d * kLog2Pi + log_det_s + maha);

    // Hellinger between the projected prediction N(Hx, P00) and the evidence
    // N(z, R). Their average covariance is S/2, so the factorization of S is
    // reused: maha_avg = 2*maha, logdet avg = logdet S - d*ln2.
    ws.llt_p.compute(ws.p00);
    if (ws.llt_p.info() != Eigen::Success) {
        ws.p00.diagonal().array() += 1e-9 * std::max(ws.p00.trace() / d, 1.0);
        ws.llt_p.compute(ws.p00);
        if (ws.llt_p.info() != Eigen::Success) {
            throw NumericalFailure("mjpf: predicted covariance not positive definite");
        }
    }
    const double log_det_p = 2.0 * ws.llt_p.matrixLLT().diagonal().array().log().sum();
    const double bhatta = 0.25 * maha +
                          0.5 * (log_det_s - d * std::log(2.0) -
                                 0.5 * (log_det_p + model_.log_det_obs_cov));
    theta_out = std::sqrt(1.0 - std::min(std::exp(-bhatta), 1.0));

    // Measurement update, Joseph form.
    ws.gain = ws.llt_s.solve(p.cov.leftCols(d).transpose()).transpose();
    p.mean.noalias() += ws.gain * ws.innov;
    ws.joseph = Eigen::MatrixXd::Identity(p.cov.rows(), p.cov.cols());
    ws.joseph.leftCols(d) -= ws.gain;
    ws.tmp.noalias() = ws.joseph * p.cov;
    p.cov.noalias() = ws.tmp * ws.joseph.transpose();
    ws.gain_r.noalias() = ws.gain * model_.obs_cov;
    p.cov.noalias() += ws.gain_r * ws.gain.transpose();
}

void MarkovJumpFilter::predict() {
    const int n = static_cast<int>(particles_.size());
    // One draw per particle, in particle order, regardless of thread count.
    for (int i = 0; i < n; ++i) uniforms_[i] = rng_.uniform();

    std::exception_ptr err = nullptr;
    if (exec_ == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            try {
                predict_particle(particles_[i], uniforms_[i], workspaces_[thread_id()]);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            predict_particle(particles_[i], uniforms_[i], workspaces_[0]);
        }
    }
    if (err) std::rethrow_exception(err);
    predicted_ = true;
}

StepResult MarkovJumpFilter::update(const Eigen::VectorXd& z_raw, int tick, double t,
                                    bool keep_mixture) {
    if (!predicted_) throw Error("mjpf: update called before predict");
    predicted_ = false;
    const int n = static_cast<int>(particles_.size());
    const Eigen::VectorXd z = model_.scaler.apply_row(z_raw);

    for (int i = 0; i < n; ++i) pre_weights_[i] = particles_[i].weight;

    StepResult result;
    result.tick = tick;
    result.t = t;
    if (keep_mixture) {
        result.mixture = particles_;   // predicted Gaussians, pre-update weights
    }

    std::exception_ptr err = nullptr;
    if (exec_ == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            try {
                update_particle(particles_[i], z, workspaces_[thread_id()], theta_i_[i],
                                loglik_[i]);
            } catch (...) {
#pragma omp critical
                if (!err) err = std::current_exception();
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            update_particle(particles_[i], z, workspaces_[0], theta_i_[i], loglik_[i]);
        }
    }
    if (err) std::rethrow_exception(err);

    // Abnormality pairs the *prediction* with the evidence, so it is
    // aggregated under the pre-update weights.
    double theta = 0.0;
    for (int i = 0; i < n; ++i) theta += pre_weights_[i] * theta_i_[i];

    bool all_floored = true;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double lik = std::exp(loglik_[i]);
        if (lik > kLikelihoodFloor) all_floored = false;
        lik = std::max(lik, kLikelihoodFloor);
        particles_[i].weight = pre_weights_[i] * lik;
        total += particles_[i].weight;
    }
    if (all_floored || total <= 0.0 || !std::isfinite(total)) {
        // Evidence is unanimously off-model: flag the tick instead of
        // trusting meaningless weight ratios.
        const double uniform = 1.0 / static_cast<double>(n);
        for (auto& p : particles_) p.weight = uniform;
        theta = *std::max_element(theta_i_.begin(), theta_i_.end());
        result.likelihood_underflow = true;
    } else {
        for (auto& p : particles_) p.weight /= total;
    }

    result.theta = std::min(std::max(theta, 0.0), 1.0);

    result.posterior_mean = Eigen::VectorXd::Zero(model_.state_dim());
    std::fill(word_mass_.begin(), word_mass_.end(), 0.0);
    double sq = 0.0;
    for (const auto& p : particles_) {
        result.posterior_mean += p.weight * p.mean;
        word_mass_[p.word] += p.weight;
        sq += p.weight * p.weight;
    }
    result.ess = 1.0 / sq;
    result.map_word = static_cast<int>(
        std::max_element(word_mass_.begin(), word_mass_.end()) - word_mass_.begin());

    if (result.ess < 0.5 * static_cast<double>(n)) {
        systematic_resample();
        result.resampled = true;
    }
    return result;
}

void MarkovJumpFilter::systematic_resample() {
    const int n = static_cast<int>(particles_.size());
    const double step = 1.0 / static_cast<double>(n);
    double target = rng_.uniform() * step;
    double cum = particles_[0].weight;
    int idx = 0;
    for (int j = 0; j < n; ++j) {
        while (cum < target && idx < n - 1) {
            ++idx;
            cum += particles_[idx].weight;
        }
        scratch_[j] = particles_[idx];
        scratch_[j].weight = step;
        target += step;
    }
    particles_.swap(scratch_);
}

double MarkovJumpFilter::effective_sample_size() const {
    double sq = 0.0;
    for (const auto& p : particles_) sq += p.weight * p.weight;
    return 1.0 / sq;
}

std::vector<StepResult> run_sequence(const ModelBundle& model, const SensorSeries& series,
                                     const MjpfOptions& options) {
    if (series.ticks() == 0) throw SeriesTooShort("mjpf: empty series");
    std::vector<int> cols;
    for (const auto& name : model.channels) {
        const int idx = series.channel_index(name);
        if (idx < 0) throw UnknownChannel("series lacks model channel '" + name + "'");
        cols.push_back(idx);
    }
    auto pick = [&](std::size_t k) {
        Eigen::VectorXd z(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) z[j] = series.values(k, cols[j]);
        return z;
    };

    MarkovJumpFilter filter(model, options.particles, pick(0), options.seed, options.exec);
    std::vector<StepResult> results;
    results.reserve(series.ticks() - 1);
    for (std::size_t k = 1; k < series.ticks(); ++k) {
        filter.predict();
        results.push_back(filter.update(pick(k), static_cast<int>(k), series.timestamps[k],
                                        options.keep_mixture));
    }
    return results;
}

ModelBundle train_model(const SensorSeries& training, const FeatureCase& fc,
                        const TrainConfig& config) {
    if (config.r_std <= 0.0) throw InvalidParams("train: r_std must be positive");
    const SensorSeries sub = select_feature(training, fc);
    const GeneralizedSeries gen = derive_generalized(sub, config.order);
    Vocabulary vocab = build_vocabulary(gen, config.gng);
    const std::vector<int> seq = encode(gen, vocab, Exec::serial);
    const double alpha = config.transition_alpha >= 0.0
                             ? config.transition_alpha
                             : default_transition_alpha(seq.size(), vocab.word_count());

    ModelBundle model;
    model.feature_id = fc.id;
    model.channels = sub.channels;
    model.dt = gen.dt;
    model.order = gen.order;
    model.dim = gen.dim;
    model.scaler = gen.scaler;
    model.transitions = learn_transitions(seq, vocab, alpha);
    model.vocab = std::move(vocab);
    model.obs_cov = config.r_std * config.r_std *
                    Eigen::MatrixXd::Identity(model.dim, model.dim);
    model.finalize();
    return model;
}

}  // namespace egokit
