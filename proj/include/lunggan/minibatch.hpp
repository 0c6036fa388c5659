#pragma once

#include <torch/torch.h>

#include <vector>

#include "lunggan/common.hpp"
#include "lunggan/discriminator.hpp"
#include "lunggan/generator.hpp"

namespace lunggan {

// Pairwise L1 distances between rows: (n, d) -> (n, n). Rows are processed
// in blocks so the broadcast buffer stays at (chunk, n, d).
torch::Tensor pairwise_l1(const torch::Tensor& features, int64_t chunk = 16);

// Per-row L1 distance to the nearest other row (diagonal excluded): (n,).
// Small values mean the row has a near-duplicate in the batch.
torch::Tensor mdmin_scores(const torch::Tensor& features, int64_t chunk = 16);

struct LargeEbsConfig {
  int64_t candidate_count = 192;  // latents drawn per selection pass
  int64_t keep_count = 48;        // most redundant samples kept for the update
  int64_t warmup_epochs = 5;      // plain sampling before selection kicks in
  int tap_layer = 4;              // discriminator block providing the features
};

// Indices of the keep_count rows with the smallest nearest-neighbour
// distances, ascending by score, ties broken by ascending index.
std::vector<int64_t> largeebs_select_from(const torch::Tensor& features, int64_t keep_count,
                                          int64_t chunk = 16);

// Full selection pass: generates the candidates without gradients with the
// generator in eval mode, taps discriminator features, and returns the
// selected latent rows (keep_count, latent). Model modes are restored.
torch::Tensor largeebs_select(Generator& generator, Discriminator& discriminator,
                              const torch::Tensor& candidate_latents,
                              const LargeEbsConfig& config);

}  // namespace lunggan
