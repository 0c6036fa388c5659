#pragma once

#include <Eigen/Dense>

#include "lunggan/volume.hpp"

namespace lunggan {

// Empirical Gaussian fit to a feature sample.
struct FeatureStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;  // unbiased (n-1), symmetrized
  int64_t n = 0;
};

// Rows are samples, columns are feature dimensions; needs at least two rows.
FeatureStats gaussian_stats(const Eigen::MatrixXd& features);

// Squared Fréchet distance between two Gaussians:
//   |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2)
// computed by eigendecomposition with negative eigenvalues clipped to zero;
// on solver failure the covariances are retried once with 1e-6 jitter on the
// diagonal before raising NumericalError.
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

// Central axial slice of a patch (depth index = depth / 2).
Image2D central_slice(const Patch& patch);

}  // namespace lunggan
