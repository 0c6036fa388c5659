#pragma once

#include <array>
#include <vector>

#include "lunggan/common.hpp"

namespace lunggan {

// ROC over integer branch counts. Every integer threshold t from
// min(count) to max(count)+1 classifies "count >= t" as real-like, with the
// real list as the positive class, so TPR and FPR both fall from 1 to 0 as
// t rises. The AUC is the trapezoid area, which equals the Mann-Whitney
// statistic P(real > fake) + P(real = fake)/2.
struct RocCurve {
  std::vector<int> thresholds;  // ascending
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.5;
  double auc_boot_sd = 0.0;
  std::array<double, 2> auc_ci{0.0, 1.0};  // 95% percentile bootstrap
  int n_boot = 0;
};

double roc_auc(const std::vector<int>& real_counts, const std::vector<int>& fake_counts);

RocCurve branch_count_roc(const std::vector<int>& real_counts,
                          const std::vector<int>& fake_counts, int n_boot, Rng& rng);

}  // namespace lunggan
