#pragma once

#include <torch/torch.h>

#include <memory>

#include "lunggan/common.hpp"
#include "lunggan/volume.hpp"

namespace lunggan {

struct DiscriminatorConfig {
  bool use_mdmin = false;
  Rational width{1, 1};
  uint64_t seed = 7;
};

// ----- struct{Discriminator3d}(nn::Module) -----
// Four strided convolutions (no bias, leaky ReLU 0.2) shrink a
// (1, 32, 64, 64) patch to a (8c, 2, 4, 4) map; the head collapses it to one
// logit per sample. With the minibatch-similarity channel enabled, each
// sample's distance to its nearest minibatch neighbour (L1 over the flattened
// final map) is appended as a constant extra channel before the head, so the
// head sees how alone each sample is in feature space.
struct Discriminator3dImpl : torch::nn::Module {
  Discriminator3dImpl(const Rational& width, bool use_mdmin);
  // (batch, 1, 32, 64, 64) -> (batch,) raw logits.
  torch::Tensor forward(const torch::Tensor& x);
  // Flattened post-activation features of block `layer` in 1..4, (batch, n).
  torch::Tensor features_at_layer(const torch::Tensor& x, int layer);

  torch::nn::Conv3d conv1{nullptr}, conv2{nullptr}, conv3{nullptr}, conv4{nullptr},
      head{nullptr};
  bool use_mdmin = false;
};
TORCH_MODULE(Discriminator3d);

class Discriminator {
 public:
  Discriminator() = default;
  explicit Discriminator(const DiscriminatorConfig& config);

  const DiscriminatorConfig& config() const { return config_; }
  bool use_mdmin() const { return config_.use_mdmin; }
  int64_t parameter_count() const;
  std::shared_ptr<torch::nn::Module> module() const;
  bool is_training() const { return module()->is_training(); }
  void train(bool on = true) { module()->train(on); }
  void eval() { module()->eval(); }

  torch::Tensor forward(const torch::Tensor& x) { return impl_->forward(x); }
  torch::Tensor features_at_layer(const torch::Tensor& x, int layer) {
    return impl_->features_at_layer(x, layer);
  }

 private:
  DiscriminatorConfig config_;
  Discriminator3d impl_{nullptr};
};

// Seeds libtorch's global RNG with config.seed before construction.
Discriminator build_discriminator(const DiscriminatorConfig& config);

}  // namespace lunggan
