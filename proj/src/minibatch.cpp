#include "lunggan/minibatch.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace lunggan {

torch::Tensor pairwise_l1(const torch::Tensor& features, int64_t chunk) {
  if (features.dim() != 2) throw ArgumentError("pairwise distances need a (n, d) tensor");
  if (features.size(0) < 2) throw ArgumentError("pairwise distances need at least 2 rows");
  if (chunk < 1) throw ArgumentError("chunk size must be positive");
  int64_t n = features.size(0);
  auto out = torch::empty({n, n}, features.options());
  for (int64_t start = 0; start < n; start += chunk) {
    int64_t rows = std::min(chunk, n - start);
    auto block = features.narrow(0, start, rows).unsqueeze(1);  // (rows, 1, d)
    auto diff = (block - features.unsqueeze(0)).abs().sum(-1);  // (rows, n)
    out.narrow(0, start, rows).copy_(diff);
  }
  return out;
}

torch::Tensor mdmin_scores(const torch::Tensor& features, int64_t chunk) {
  int64_t n = features.size(0);
  if (n < 2) throw ArgumentError("nearest-neighbour distances need at least 2 rows");
  auto distances = pairwise_l1(features, chunk);
  auto inf = std::numeric_limits<double>::infinity();
  auto self = torch::eye(n, torch::TensorOptions(torch::kBool).device(distances.device()));
  auto masked = distances.masked_fill(self, inf);
  return std::get<0>(masked.min(1));
}

std::vector<int64_t> largeebs_select_from(const torch::Tensor& features, int64_t keep_count,
                                          int64_t chunk) {
  int64_t n = features.size(0);
  if (keep_count < 1 || keep_count > n) {
    throw ArgumentError("keep count must lie in 1..candidate count");
  }
  auto scores = mdmin_scores(features, chunk).to(torch::kDouble).contiguous();
  const double* s = scores.data_ptr<double>();
  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int64_t a, int64_t b) { return s[a] < s[b]; });
  order.resize(static_cast<size_t>(keep_count));
  return order;
}

torch::Tensor largeebs_select(Generator& generator, Discriminator& discriminator,
                              const torch::Tensor& candidate_latents,
                              const LargeEbsConfig& config) {
  if (candidate_latents.dim() != 2) {
    throw ArgumentError("candidate latents must be a (n, latent) tensor");
  }
  if (candidate_latents.size(0) != config.candidate_count) {
    throw ArgumentError("candidate batch size does not match the configured count");
  }
  torch::NoGradGuard no_grad;
  bool g_training = generator.is_training();
  bool d_training = discriminator.is_training();
  generator.eval();
  discriminator.eval();
  auto patches = generator.forward(candidate_latents);
  auto features = discriminator.features_at_layer(patches, config.tap_layer);
  auto picked = largeebs_select_from(features, config.keep_count);
  generator.train(g_training);
  discriminator.train(d_training);
  auto index = torch::from_blob(picked.data(), {static_cast<int64_t>(picked.size())},
                                torch::kLong)
                   .clone();
  return candidate_latents.index_select(0, index);
}

}  // namespace lunggan
