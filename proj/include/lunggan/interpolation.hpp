#pragma once

#include <Eigen/Dense>

#include "lunggan/common.hpp"

namespace lunggan {

// Linear interpolation a + t (b - a).
Eigen::VectorXd lerp(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t);

// Spherical interpolation along the great circle between a and b; falls back
// to lerp when the subtended angle is negligible. Zero vectors are rejected.
Eigen::VectorXd slerp(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double t);

// n evenly spaced interpolation steps from a (t=0) to b (t=1), inclusive.
std::vector<Eigen::VectorXd> interpolation_path(const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& b, int steps,
                                                bool spherical);

}  // namespace lunggan
