#pragma once

#include <Eigen/Dense>

#include "egokit/errors.hpp"

namespace egokit {

struct GaussianDensity {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;   // symmetric positive definite
};

// Bhattacharyya coefficient between two Gaussians, closed form:
//   lambda = exp(-D), D = 1/8 d' Sbar^-1 d + 1/2 ln(det Sbar / sqrt(det S1 det S2)),
//   Sbar = (S1+S2)/2. Determinants via Cholesky log-determinants.
double bhattacharyya_gaussian(const GaussianDensity& p, const GaussianDensity& q);

// Same, on raw views (used by hot loops).
double bhattacharyya_gaussian(const Eigen::Ref<const Eigen::VectorXd>& mean1,
                              const Eigen::Ref<const Eigen::MatrixXd>& cov1,
                              const Eigen::Ref<const Eigen::VectorXd>& mean2,
                              const Eigen::Ref<const Eigen::MatrixXd>& cov2);

// Hellinger distance theta = sqrt(1 - lambda); lambda clamped to [0,1] within
// 1e-12 slack, anything further out throws CoefficientOutOfRange.
double hellinger(double lambda);

}  // namespace egokit
