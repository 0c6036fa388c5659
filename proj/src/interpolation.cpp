#include "lunggan/interpolation.hpp"

#include <cmath>

namespace lunggan {

Eigen::VectorXd lerp(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t) {
  if (a.size() != b.size()) throw ArgumentError("lerp endpoints must have equal dimension");
  return a + t * (b - a);
}

Eigen::VectorXd slerp(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t) {
  if (a.size() != b.size()) throw ArgumentError("slerp endpoints must have equal dimension");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw ArgumentError("slerp is undefined for zero-norm endpoints");
  }
  double cosine = a.dot(b) / (na * nb);
  cosine = std::clamp(cosine, -1.0, 1.0);
  double omega = std::acos(cosine);
  if (omega < 1e-7) return lerp(a, b, t);
  double s = std::sin(omega);
  return (std::sin((1.0 - t) * omega) / s) * a + (std::sin(t * omega) / s) * b;
}

std::vector<Eigen::VectorXd> interpolation_path(const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& b, int steps,
                                                bool spherical) {
  if (steps < 2) throw ArgumentError("an interpolation path needs at least two steps");
  std::vector<Eigen::VectorXd> path;
  path.reserve(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    path.push_back(spherical ? slerp(a, b, t) : lerp(a, b, t));
  }
  return path;
}

}  // namespace lunggan
