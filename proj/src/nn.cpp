#include "lunggan/nn.hpp"

namespace lunggan {

namespace {

torch::Tensor l2_normalize(const torch::Tensor& v) { return v / (v.norm() + 1e-12); }

// One power iteration on the (out, rest) weight matrix; updates u/v in place.
void power_iterate(const torch::Tensor& w_mat, torch::Tensor& u, torch::Tensor& v) {
  torch::NoGradGuard no_grad;
  v.copy_(l2_normalize(w_mat.t().mv(u)));
  u.copy_(l2_normalize(w_mat.mv(v)));
}

torch::Tensor spectral_sigma(const torch::Tensor& w_mat, const torch::Tensor& u,
                             const torch::Tensor& v) {
  return u.dot(w_mat.mv(v));
}

double top_singular_after(const torch::Tensor& weight_orig, torch::Tensor& u, torch::Tensor& v,
                          int iters) {
  torch::NoGradGuard no_grad;
  auto w_mat = weight_orig.reshape({weight_orig.size(0), -1});
  for (int i = 0; i < iters; ++i) power_iterate(w_mat, u, v);
  auto sigma = spectral_sigma(w_mat, u, v);
  auto normalized = w_mat / sigma;
  return torch::linalg_svdvals(normalized)[0].item<double>();
}

}  // namespace

// ----- struct{SNLinear}(nn::Module) -----
SNLinearImpl::SNLinearImpl(int64_t in_features_, int64_t out_features_, bool with_bias)
    : in_features(in_features_), out_features(out_features_) {
  weight_orig = register_parameter(
      "weight_orig", torch::empty({out_features, in_features}));
  torch::nn::init::normal_(weight_orig, 0.0, 0.02);
  if (with_bias) {
    bias = register_parameter("bias", torch::zeros({out_features}));
  }
  u = register_buffer("u", l2_normalize(torch::randn({out_features})));
  v = register_buffer("v", l2_normalize(torch::randn({in_features})));
  power_iterate(weight_orig.reshape({out_features, -1}), u, v);
}

torch::Tensor SNLinearImpl::normalized_weight() {
  auto w_mat = weight_orig.reshape({out_features, -1});
  if (is_training()) power_iterate(w_mat, u, v);
  return weight_orig / spectral_sigma(w_mat, u, v);
}

torch::Tensor SNLinearImpl::forward(const torch::Tensor& x) {
  return torch::linear(x, normalized_weight(), bias);
}

double SNLinearImpl::normalized_weight_top_singular(int iters) {
  return top_singular_after(weight_orig, u, v, iters);
}

// ----- struct{SNConv3d}(nn::Module) -----
SNConv3dImpl::SNConv3dImpl(int64_t in_channels, int64_t out_channels,
                           std::vector<int64_t> kernel, std::vector<int64_t> stride_,
                           std::vector<int64_t> padding_, bool with_bias)
    : stride(std::move(stride_)), padding(std::move(padding_)) {
  weight_orig = register_parameter(
      "weight_orig",
      torch::empty({out_channels, in_channels, kernel.at(0), kernel.at(1), kernel.at(2)}));
  torch::nn::init::normal_(weight_orig, 0.0, 0.02);
  if (with_bias) {
    bias = register_parameter("bias", torch::zeros({out_channels}));
  }
  int64_t rest = in_channels * kernel[0] * kernel[1] * kernel[2];
  u = register_buffer("u", l2_normalize(torch::randn({out_channels})));
  v = register_buffer("v", l2_normalize(torch::randn({rest})));
  power_iterate(weight_orig.reshape({out_channels, -1}), u, v);
}

torch::Tensor SNConv3dImpl::normalized_weight() {
  auto w_mat = weight_orig.reshape({weight_orig.size(0), -1});
  if (is_training()) power_iterate(w_mat, u, v);
  return weight_orig / spectral_sigma(w_mat, u, v);
}

torch::Tensor SNConv3dImpl::forward(const torch::Tensor& x) {
  return torch::conv3d(x, normalized_weight(), bias, stride, padding);
}

double SNConv3dImpl::normalized_weight_top_singular(int iters) {
  return top_singular_after(weight_orig, u, v, iters);
}

SNConv3d make_sn_conv3d(int64_t in_channels, int64_t out_channels,
                        std::vector<int64_t> kernel, std::vector<int64_t> stride,
                        std::vector<int64_t> padding, bool with_bias) {
  return SNConv3d(std::make_shared<SNConv3dImpl>(in_channels, out_channels, std::move(kernel),
                                                 std::move(stride), std::move(padding),
                                                 with_bias));
}

// ----- struct{AdaIn3d}(nn::Module) -----
AdaIn3dImpl::AdaIn3dImpl(int64_t channels_, int64_t latent_dim) : channels(channels_) {
  affine = register_module("affine", torch::nn::Linear(latent_dim, 2 * channels));
  torch::NoGradGuard no_grad;
  affine->bias.zero_();
}

std::pair<torch::Tensor, torch::Tensor> AdaIn3dImpl::style_params(const torch::Tensor& w) {
  if (w.dim() != 2) throw ArgumentError("style code must be a (batch, latent) tensor");
  auto style = affine->forward(w);
  auto scale = style.narrow(1, 0, channels) + 1.0;
  auto shift = style.narrow(1, channels, channels);
  return {scale, shift};
}

torch::Tensor AdaIn3dImpl::forward(const torch::Tensor& x, const torch::Tensor& w) {
  if (x.dim() != 5 || x.size(1) != channels) {
    throw ArgumentError("adaptive instance norm expects a (batch, " +
                        std::to_string(channels) + ", d, h, w) activation");
  }
  auto [scale, shift] = style_params(w);
  std::vector<int64_t> dims{2, 3, 4};
  auto mean = x.mean(dims, /*keepdim=*/true);
  auto var = x.var(dims, /*unbiased=*/false, /*keepdim=*/true);
  auto normalized = (x - mean) / torch::sqrt(var + 1e-8);
  auto expand = [](const torch::Tensor& t) {
    return t.unsqueeze(-1).unsqueeze(-1).unsqueeze(-1);
  };
  return normalized * expand(scale) + expand(shift);
}

// ----- struct{SelfAttention3d}(nn::Module) -----
SelfAttention3dImpl::SelfAttention3dImpl(int64_t channels_) : channels(channels_) {
  int64_t qk = std::max<int64_t>(1, channels / 8);
  int64_t vc = std::max<int64_t>(1, channels / 2);
  query = register_module(
      "query", make_sn_conv3d(channels, qk, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  key = register_module("key", make_sn_conv3d(channels, qk, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  value = register_module(
      "value", make_sn_conv3d(channels, vc, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  out = register_module("out", make_sn_conv3d(vc, channels, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}));
  gamma = register_parameter("gamma", torch::zeros({1}));
}

torch::Tensor SelfAttention3dImpl::forward(const torch::Tensor& x) {
  if (x.dim() != 5) throw ArgumentError("self-attention expects a 5-d activation");
  int64_t b = x.size(0), c = x.size(1);
  int64_t n = x.size(2) * x.size(3) * x.size(4);
  auto q = query->forward(x).reshape({b, -1, n}).permute({0, 2, 1});
  auto k = key->forward(x).reshape({b, -1, n});
  auto attention = torch::softmax(q.bmm(k), -1);
  auto v = value->forward(x).reshape({b, -1, n});
  auto mixed = v.bmm(attention.permute({0, 2, 1}));
  auto o = out->forward(mixed.reshape({b, -1, x.size(2), x.size(3), x.size(4)}));
  (void)c;
  return gamma * o + x;
}

// ----- struct{MappingNetwork}(nn::Module) -----
MappingNetworkImpl::MappingNetworkImpl(int64_t latent_dim, int depth) {
  for (int i = 0; i < depth; ++i) {
    layers.push_back(
        register_module("fc" + std::to_string(i), torch::nn::Linear(latent_dim, latent_dim)));
  }
}

torch::Tensor MappingNetworkImpl::forward(torch::Tensor z) {
  if (z.dim() != 2) throw ArgumentError("mapping network expects a (batch, latent) tensor");
  for (auto& layer : layers) {
    z = torch::leaky_relu(layer->forward(z), 0.2);
  }
  return z;
}

void dcgan_weight_init(torch::nn::Module& module) {
  torch::NoGradGuard no_grad;
  for (const auto& m : module.modules(/*include_self=*/false)) {
    if (auto* conv = m->as<torch::nn::Conv3d>()) {
      torch::nn::init::normal_(conv->weight, 0.0, 0.02);
    } else if (auto* tconv = m->as<torch::nn::ConvTranspose3d>()) {
      torch::nn::init::normal_(tconv->weight, 0.0, 0.02);
    } else if (auto* bn = m->as<torch::nn::BatchNorm3d>()) {
      torch::nn::init::normal_(bn->weight, 1.0, 0.02);
      torch::nn::init::zeros_(bn->bias);
    }
  }
}

}  // namespace lunggan
