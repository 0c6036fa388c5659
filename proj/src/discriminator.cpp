#include "lunggan/discriminator.hpp"

#include "lunggan/minibatch.hpp"
#include "lunggan/nn.hpp"

namespace lunggan {

// ----- struct{Discriminator3d}(nn::Module) -----
Discriminator3dImpl::Discriminator3dImpl(const Rational& width, bool use_mdmin_)
    : use_mdmin(use_mdmin_) {
  int64_t c64 = width.scale(64), c128 = width.scale(128);
  int64_t c256 = width.scale(256), c512 = width.scale(512);
  using Opt = torch::nn::Conv3dOptions;
  conv1 = register_module(
      "conv1",
      torch::nn::Conv3d(Opt(1, c64, {2, 4, 4}).stride(2).padding({0, 1, 1}).bias(false)));
  conv2 = register_module(
      "conv2", torch::nn::Conv3d(Opt(c64, c128, {4, 4, 4}).stride(2).padding(1).bias(false)));
  conv3 = register_module(
      "conv3", torch::nn::Conv3d(Opt(c128, c256, {4, 4, 4}).stride(2).padding(1).bias(false)));
  conv4 = register_module(
      "conv4", torch::nn::Conv3d(Opt(c256, c512, {4, 4, 4}).stride(2).padding(1).bias(false)));
  head = register_module(
      "head",
      torch::nn::Conv3d(Opt(c512 + (use_mdmin ? 1 : 0), 1, {2, 4, 4}).stride(1).padding(0)));
  dcgan_weight_init(*this);
}

torch::Tensor Discriminator3dImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 5 || x.size(1) != 1) {
    throw ArgumentError("discriminator expects a (batch, 1, d, h, w) tensor");
  }
  auto h = torch::leaky_relu(conv1->forward(x), 0.2);
  h = torch::leaky_relu(conv2->forward(h), 0.2);
  h = torch::leaky_relu(conv3->forward(h), 0.2);
  h = torch::leaky_relu(conv4->forward(h), 0.2);
  if (use_mdmin) {
    if (x.size(0) < 2) {
      throw ArgumentError(
          "the minibatch-similarity channel needs at least 2 samples per batch");
    }
    auto scores = mdmin_scores(h.flatten(1));  // (batch,)
    auto channel = scores.reshape({-1, 1, 1, 1, 1})
                       .expand({-1, 1, h.size(2), h.size(3), h.size(4)});
    h = torch::cat({h, channel}, 1);
  }
  return head->forward(h).reshape({x.size(0)});
}

torch::Tensor Discriminator3dImpl::features_at_layer(const torch::Tensor& x, int layer) {
  if (layer < 1 || layer > 4) throw ArgumentError("feature tap layer must lie in 1..4");
  auto h = torch::leaky_relu(conv1->forward(x), 0.2);
  if (layer >= 2) h = torch::leaky_relu(conv2->forward(h), 0.2);
  if (layer >= 3) h = torch::leaky_relu(conv3->forward(h), 0.2);
  if (layer >= 4) h = torch::leaky_relu(conv4->forward(h), 0.2);
  return h.flatten(1);
}

// ----- handle -----
Discriminator::Discriminator(const DiscriminatorConfig& config)
    : config_(config), impl_(Discriminator3d(config.width, config.use_mdmin)) {}

std::shared_ptr<torch::nn::Module> Discriminator::module() const {
  if (!impl_) throw ArgumentError("discriminator handle is empty");
  return impl_.ptr();
}

int64_t Discriminator::parameter_count() const {
  int64_t total = 0;
  for (const auto& p : module()->parameters()) total += p.numel();
  return total;
}

Discriminator build_discriminator(const DiscriminatorConfig& config) {
  torch::manual_seed(config.seed);
  return Discriminator(config);
}

}  // namespace lunggan
