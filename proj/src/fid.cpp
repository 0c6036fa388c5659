#include "lunggan/fid.hpp"

#include <cmath>

namespace lunggan {

FeatureStats gaussian_stats(const Eigen::MatrixXd& features) {
  if (features.rows() < 2) {
    throw ArgumentError("gaussian_stats needs at least two feature rows");
  }
  FeatureStats stats;
  stats.n = features.rows();
  stats.mu = features.colwise().mean();
  Eigen::MatrixXd centered = features.rowwise() - stats.mu.transpose();
  stats.sigma = (centered.transpose() * centered) / static_cast<double>(features.rows() - 1);
  stats.sigma = 0.5 * (stats.sigma + stats.sigma.transpose()).eval();
  return stats;
}

namespace {

// Symmetric PSD square root; negative eigenvalues from roundoff are clipped.
bool psd_sqrt(const Eigen::MatrixXd& m, Eigen::MatrixXd& root) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) return false;
  Eigen::VectorXd vals = solver.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    vals[i] = vals[i] > 0.0 ? std::sqrt(vals[i]) : 0.0;
  }
  root = solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().transpose();
  return true;
}

// trace((Sa^1/2 Sb Sa^1/2)^1/2) via the eigenvalues of the inner product.
bool trace_sqrt_product(const Eigen::MatrixXd& sa, const Eigen::MatrixXd& sb, double& out) {
  Eigen::MatrixXd root_a;
  if (!psd_sqrt(sa, root_a)) return false;
  Eigen::MatrixXd inner = root_a * sb * root_a;
  inner = 0.5 * (inner + inner.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(inner);
  if (solver.info() != Eigen::Success) return false;
  out = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    double v = solver.eigenvalues()[i];
    if (v > 0.0) out += std::sqrt(v);
  }
  return true;
}

}  // namespace

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
  if (a.mu.size() != b.mu.size()) {
    throw ArgumentError("frechet_distance: feature dimensions differ (" +
                        std::to_string(a.mu.size()) + " vs " + std::to_string(b.mu.size()) + ")");
  }
  double mean_term = (a.mu - b.mu).squaredNorm();
  double tr = 0.0;
  if (!trace_sqrt_product(a.sigma, b.sigma, tr)) {
    double eps = 1e-6;
    Eigen::MatrixXd sa = a.sigma + eps * Eigen::MatrixXd::Identity(a.sigma.rows(), a.sigma.cols());
    Eigen::MatrixXd sb = b.sigma + eps * Eigen::MatrixXd::Identity(b.sigma.rows(), b.sigma.cols());
    if (!trace_sqrt_product(sa, sb, tr)) {
      throw NumericalError("covariance square root failed even after diagonal regularization");
    }
  }
  double d = mean_term + a.sigma.trace() + b.sigma.trace() - 2.0 * tr;
  // Roundoff can push an exact zero slightly negative.
  return d < 0.0 ? 0.0 : d;
}

Image2D central_slice(const Patch& patch) {
  if (patch.shape[0] != kPatchDepth || patch.shape[1] != kPatchHeight ||
      patch.shape[2] != kPatchWidth) {
    throw ArgumentError("central_slice expects a " + std::to_string(kPatchDepth) + "x" +
                        std::to_string(kPatchHeight) + "x" + std::to_string(kPatchWidth) +
                        " patch");
  }
  int64_t z = patch.shape[0] / 2;
  Image2D slice(patch.shape[1], patch.shape[2]);
  const float* src = &patch.data[patch.index(z, 0, 0)];
  std::copy(src, src + slice.data.size(), slice.data.begin());
  return slice;
}

}  // namespace lunggan
