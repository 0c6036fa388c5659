#pragma once

#include <torch/torch.h>

#include "lunggan/common.hpp"

namespace lunggan {

// ----- struct{SNLinear}(nn::Module) -----
// Fully connected layer whose weight is divided by its top singular value,
// estimated by one power iteration per training forward; u/v live in buffers
// so eval-mode forwards are pure functions of the parameters.
struct SNLinearImpl : torch::nn::Module {
  SNLinearImpl(int64_t in_features, int64_t out_features, bool with_bias = true);
  torch::Tensor forward(const torch::Tensor& x);
  torch::Tensor normalized_weight();
  // Test hook: refreshes u/v with `iters` power iterations on the frozen
  // weight, then returns the exact top singular value of weight/sigma.
  double normalized_weight_top_singular(int iters);

  torch::Tensor weight_orig, bias, u, v;
  int64_t in_features, out_features;
};
TORCH_MODULE(SNLinear);

// ----- struct{SNConv3d}(nn::Module) -----
struct SNConv3dImpl : torch::nn::Module {
  SNConv3dImpl(int64_t in_channels, int64_t out_channels, std::vector<int64_t> kernel,
               std::vector<int64_t> stride, std::vector<int64_t> padding,
               bool with_bias = true);
  torch::Tensor forward(const torch::Tensor& x);
  torch::Tensor normalized_weight();
  double normalized_weight_top_singular(int iters);

  torch::Tensor weight_orig, bias, u, v;
  std::vector<int64_t> stride, padding;
};
TORCH_MODULE(SNConv3d);

// Factory with concrete parameter types so call sites can use braced lists
// (the holder's forwarding constructor cannot deduce them).
SNConv3d make_sn_conv3d(int64_t in_channels, int64_t out_channels,
                        std::vector<int64_t> kernel, std::vector<int64_t> stride,
                        std::vector<int64_t> padding, bool with_bias = true);

// ----- struct{AdaIn3d}(nn::Module) -----
// Adaptive instance normalization: per-sample/channel standardization of the
// activation followed by a style-derived affine; the style code passes
// through a learned linear map producing (scale - 1, shift) per channel.
struct AdaIn3dImpl : torch::nn::Module {
  AdaIn3dImpl(int64_t channels, int64_t latent_dim = kLatentDim);
  torch::Tensor forward(const torch::Tensor& x, const torch::Tensor& w);
  // The (scale, shift) pair the style produces, each (B, C).
  std::pair<torch::Tensor, torch::Tensor> style_params(const torch::Tensor& w);

  torch::nn::Linear affine{nullptr};
  int64_t channels;
};
TORCH_MODULE(AdaIn3d);

// ----- struct{SelfAttention3d}(nn::Module) -----
// Non-local attention over all spatial positions of a 3-D feature map with a
// zero-initialized residual gate, so a fresh block is the identity.
struct SelfAttention3dImpl : torch::nn::Module {
  explicit SelfAttention3dImpl(int64_t channels);
  torch::Tensor forward(const torch::Tensor& x);

  SNConv3d query{nullptr}, key{nullptr}, value{nullptr}, out{nullptr};
  torch::Tensor gamma;
  int64_t channels;
};
TORCH_MODULE(SelfAttention3d);

// ----- struct{MappingNetwork}(nn::Module) -----
struct MappingNetworkImpl : torch::nn::Module {
  MappingNetworkImpl(int64_t latent_dim = kLatentDim, int depth = 9);
  torch::Tensor forward(torch::Tensor z);

  std::vector<torch::nn::Linear> layers;
};
TORCH_MODULE(MappingNetwork);

// Weight init used by the plain convolutional generator/discriminator:
// N(0, 0.02) on conv kernels, N(1, 0.02)/0 on batch-norm affine.
void dcgan_weight_init(torch::nn::Module& module);

}  // namespace lunggan
