#include "lunggan/roc.hpp"

#include <algorithm>
#include <cmath>

#include "lunggan/stats.hpp"

namespace lunggan {

namespace {

void curve_points(const std::vector<int>& real_counts, const std::vector<int>& fake_counts,
                  std::vector<int>& thresholds, std::vector<double>& tpr,
                  std::vector<double>& fpr) {
  std::vector<int> r = real_counts, f = fake_counts;
  std::sort(r.begin(), r.end());
  std::sort(f.begin(), f.end());
  int lo = std::min(r.front(), f.front());
  int hi = std::max(r.back(), f.back()) + 1;
  thresholds.clear();
  tpr.clear();
  fpr.clear();
  for (int t = lo; t <= hi; ++t) {
    auto frac_at_least = [&](const std::vector<int>& sorted) {
      auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
      return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
    };
    thresholds.push_back(t);
    tpr.push_back(frac_at_least(r));
    fpr.push_back(frac_at_least(f));
  }
}

double trapezoid_auc(const std::vector<double>& tpr, const std::vector<double>& fpr) {
  double area = 0.0;
  for (size_t i = 0; i + 1 < fpr.size(); ++i) {
    area += (fpr[i] - fpr[i + 1]) * 0.5 * (tpr[i] + tpr[i + 1]);
  }
  return area;
}

}  // namespace

double roc_auc(const std::vector<int>& real_counts, const std::vector<int>& fake_counts) {
  if (real_counts.empty() || fake_counts.empty()) {
    throw ArgumentError("roc_auc needs non-empty real and fake count lists");
  }
  std::vector<int> thresholds;
  std::vector<double> tpr, fpr;
  curve_points(real_counts, fake_counts, thresholds, tpr, fpr);
  return trapezoid_auc(tpr, fpr);
}

RocCurve branch_count_roc(const std::vector<int>& real_counts,
                          const std::vector<int>& fake_counts, int n_boot, Rng& rng) {
  if (real_counts.empty() || fake_counts.empty()) {
    throw ArgumentError("branch_count_roc needs non-empty real and fake count lists");
  }
  if (n_boot < 0) throw ArgumentError("bootstrap count must be non-negative");

  RocCurve curve;
  curve_points(real_counts, fake_counts, curve.thresholds, curve.tpr, curve.fpr);
  curve.auc = trapezoid_auc(curve.tpr, curve.fpr);
  curve.n_boot = n_boot;
  if (n_boot == 0) {
    curve.auc_ci = {curve.auc, curve.auc};
    return curve;
  }

  std::uniform_int_distribution<size_t> pick_real(0, real_counts.size() - 1);
  std::uniform_int_distribution<size_t> pick_fake(0, fake_counts.size() - 1);
  std::vector<double> boot_aucs;
  boot_aucs.reserve(static_cast<size_t>(n_boot));
  std::vector<int> r(real_counts.size()), f(fake_counts.size());
  for (int b = 0; b < n_boot; ++b) {
    for (auto& v : r) v = real_counts[pick_real(rng)];
    for (auto& v : f) v = fake_counts[pick_fake(rng)];
    boot_aucs.push_back(roc_auc(r, f));
  }
  curve.auc_boot_sd = boot_aucs.size() > 1 ? std::sqrt(sample_variance(boot_aucs)) : 0.0;
  curve.auc_ci = {percentile(boot_aucs, 0.025), percentile(boot_aucs, 0.975)};
  return curve;
}

}  // namespace lunggan
