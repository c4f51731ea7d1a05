#include "egokit/anomaly.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace egokit {

namespace {

double cholesky_log_det(const Eigen::MatrixXd& m, Eigen::LLT<Eigen::MatrixXd>& llt) {
    llt.compute(m);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("covariance is not positive definite");
    }
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double bhattacharyya_gaussian(const Eigen::Ref<const Eigen::VectorXd>& mean1,
                              const Eigen::Ref<const Eigen::MatrixXd>& cov1,
                              const Eigen::Ref<const Eigen::VectorXd>& mean2,
                              const Eigen::Ref<const Eigen::MatrixXd>& cov2) {
    const auto d = mean1.size();
    if (mean2.size() != d || cov1.rows() != d || cov1.cols() != d || cov2.rows() != d ||
        cov2.cols() != d) {
        throw DimensionMismatch("bhattacharyya: mismatched Gaussian dimensions");
    }
    if (!mean1.allFinite() || !mean2.allFinite() || !cov1.allFinite() || !cov2.allFinite()) {
        throw Error("bhattacharyya: non-finite input");
    }

    Eigen::LLT<Eigen::MatrixXd> llt(d);
    const double log_det1 = cholesky_log_det(cov1, llt);
    const double log_det2 = cholesky_log_det(cov2, llt);

    const Eigen::MatrixXd avg = 0.5 * (cov1 + cov2);
    const double log_det_avg = cholesky_log_det(avg, llt);

    const Eigen::VectorXd diff = mean1 - mean2;
    const double maha = diff.dot(llt.solve(diff));

    const double dist = 0.125 * maha + 0.5 * (log_det_avg - 0.5 * (log_det1 + log_det2));
    double lambda = std::exp(-dist);
    if (lambda > 1.0) lambda = 1.0;   // guards rounding on identical inputs
    return lambda;
}

double bhattacharyya_gaussian(const GaussianDensity& p, const GaussianDensity& q) {
    return bhattacharyya_gaussian(p.mean, p.cov, q.mean, q.cov);
}

double hellinger(double lambda) {
    if (lambda < -1e-12 || lambda > 1.0 + 1e-12) {
        throw CoefficientOutOfRange("bhattacharyya coefficient " + std::to_string(lambda) +
                                    " outside [0,1]");
    }
    lambda = std::min(std::max(lambda, 0.0), 1.0);
    return std::sqrt(1.0 - lambda);
}

}  // namespace egokit
