#include "lunggan/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

namespace lunggan {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) throw ArgumentError("mean of an empty list is undefined");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw ArgumentError("sample variance needs at least two observations");
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw ArgumentError("percentile of an empty list is undefined");
  if (q < 0.0 || q > 1.0) throw ArgumentError("percentile fraction must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(pos));
  size_t hi = static_cast<size_t>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

WelchResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw ArgumentError("welch_t_test needs at least two observations per group");
  }
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double ma = mean_of(a), mb = mean_of(b);
  double va = sample_variance(a), vb = sample_variance(b);

  WelchResult r;
  if (va == 0.0 && vb == 0.0) {
    if (ma == mb) {
      r.t = 0.0;
      r.df = na + nb - 2.0;
      r.p = 1.0;
    } else {
      r.t = (ma > mb) ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
      r.df = na + nb - 2.0;
      r.p = 0.0;
    }
    return r;
  }

  double sa = va / na, sb = vb / nb;
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) /
         (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

}  // namespace lunggan
