#pragma once

#include <vector>

#include "lunggan/common.hpp"

namespace lunggan {

double mean_of(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // unbiased, n-1

// Linear-interpolation percentile of q in [0, 1]; copies and sorts.
double percentile(std::vector<double> v, double q);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Two-sided Welch's t-test for unequal variances. Requires at least two
// observations per group. When both variances vanish: equal means give
// p = 1 by convention, unequal means give p = 0.
WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace lunggan
