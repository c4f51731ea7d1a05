#pragma once

// Independent reference implementations used only to derive and check
// expected test values. Nothing here shares code with the library paths it
// verifies.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "egokit/anomaly.hpp"

namespace egokit::oracle {

// Gaussian pdf evaluated the long way (explicit inverse and determinant).
double gaussian_pdf(const Eigen::VectorXd& x, const GaussianDensity& g);

// Bhattacharyya coefficient by trapezoidal quadrature of sqrt(p q) over a
// box spanning both means +/- 8 sigma. Supports 1-D and 2-D Gaussians.
double bhattacharyya_numeric(const GaussianDensity& p, const GaussianDensity& q,
                             int grid_n = 1200);

// AUC as the Mann-Whitney statistic: P(score+ > score-) + 0.5 P(tie),
// brute force over all positive/negative pairs.
double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels);

// Plain Lloyd 2-means for cross-checking cluster placement.
struct KMeans2 {
    Eigen::VectorXd center0, center1;
    std::vector<int> assign;
};
KMeans2 kmeans2(const Eigen::MatrixXd& points, std::uint64_t seed, int iterations = 100);

}  // namespace egokit::oracle
