#include "lunggan/generator.hpp"

#include <ATen/CPUGeneratorImpl.h>

namespace lunggan {

namespace F = torch::nn::functional;

GanFamily parse_family(const std::string& name) {
  if (name == "dcgan") return GanFamily::Dcgan;
  if (name == "stylegan") return GanFamily::Stylegan;
  if (name == "biggan") return GanFamily::Biggan;
  throw ValidationError("model.family",
                        "unknown family '" + name + "' (expected dcgan, stylegan, biggan)");
}

std::string family_name(GanFamily family) {
  switch (family) {
    case GanFamily::Dcgan: return "dcgan";
    case GanFamily::Stylegan: return "stylegan";
    case GanFamily::Biggan: return "biggan";
  }
  throw ArgumentError("bad family enum value");
}

namespace {

torch::Tensor upsample_nearest(const torch::Tensor& x, const std::vector<int64_t>& factor) {
  std::vector<double> scales(factor.begin(), factor.end());
  return F::interpolate(x, F::InterpolateFuncOptions()
                               .scale_factor(scales)
                               .mode(torch::kNearest));
}

void check_latents(const torch::Tensor& z) {
  if (z.dim() != 2 || z.size(1) != kLatentDim) {
    throw ArgumentError("latents must be a (batch, " + std::to_string(kLatentDim) +
                        ") tensor");
  }
}

}  // namespace

// ----- struct{Dcgan3dGenerator}(nn::Module) -----
Dcgan3dGeneratorImpl::Dcgan3dGeneratorImpl(const Rational& width) {
  int64_t c512 = width.scale(512), c256 = width.scale(256);
  int64_t c128 = width.scale(128), c64 = width.scale(64);
  using TOpt = torch::nn::ConvTranspose3dOptions;
  up1 = register_module(
      "up1", torch::nn::ConvTranspose3d(TOpt(kLatentDim, c512, {4, 4, 4}).stride(1).padding(0)));
  up2 = register_module(
      "up2",
      torch::nn::ConvTranspose3d(TOpt(c512, c256, {2, 4, 4}).stride(2).padding({2, 1, 1})));
  up3 = register_module(
      "up3", torch::nn::ConvTranspose3d(TOpt(c256, c128, {4, 4, 4}).stride(2).padding(1)));
  up4 = register_module(
      "up4", torch::nn::ConvTranspose3d(TOpt(c128, c64, {4, 4, 4}).stride(2).padding(1)));
  up5 = register_module(
      "up5", torch::nn::ConvTranspose3d(TOpt(c64, 1, {4, 4, 4}).stride(2).padding(1)));
  bn1 = register_module("bn1", torch::nn::BatchNorm3d(c512));
  bn2 = register_module("bn2", torch::nn::BatchNorm3d(c256));
  bn3 = register_module("bn3", torch::nn::BatchNorm3d(c128));
  bn4 = register_module("bn4", torch::nn::BatchNorm3d(c64));
  dcgan_weight_init(*this);
}

torch::Tensor Dcgan3dGeneratorImpl::forward(const torch::Tensor& z) {
  check_latents(z);
  auto x = z.reshape({z.size(0), kLatentDim, 1, 1, 1});
  x = torch::relu(bn1->forward(up1->forward(x)));
  x = torch::relu(bn2->forward(up2->forward(x)));
  x = torch::relu(bn3->forward(up3->forward(x)));
  x = torch::relu(bn4->forward(up4->forward(x)));
  return torch::tanh(up5->forward(x));
}

// ----- struct{StyleGan3dGenerator}(nn::Module) -----
StyleGan3dGeneratorImpl::StyleGan3dGeneratorImpl(const Rational& width) {
  mapping = register_module("mapping", MappingNetwork(kLatentDim, 9));
  std::vector<int64_t> base{512, 512, 256, 256, 128, 128, 64, 64, 32, 32, 16, 1};
  std::vector<int64_t> ch(base.size());
  for (size_t i = 0; i + 1 < base.size(); ++i) ch[i] = width.scale(base[i]);
  ch.back() = 1;
  const_input = register_parameter("const_input", torch::ones({1, ch[0], 1, 2, 2}));
  for (int site = 0; site < kSites; ++site) {
    adain.push_back(register_module("adain" + std::to_string(site),
                                    AdaIn3d(ch[site], kLatentDim)));
    convs.push_back(register_module(
        "conv" + std::to_string(site),
        torch::nn::Conv3d(torch::nn::Conv3dOptions(ch[site], ch[site + 1], {3, 3, 3})
                              .stride(1)
                              .padding(1)
                              .bias(false))));
    upsample_before.push_back(site % 2 == 1);
  }
}

torch::Tensor StyleGan3dGeneratorImpl::map_latent(const torch::Tensor& z) {
  check_latents(z);
  return mapping->forward(z);
}

torch::Tensor StyleGan3dGeneratorImpl::forward(const torch::Tensor& z) {
  auto w = map_latent(z);
  return synthesize(w.unsqueeze(1).expand({-1, kSites, -1}));
}

torch::Tensor StyleGan3dGeneratorImpl::synthesize(const torch::Tensor& site_codes) {
  if (site_codes.dim() != 3 || site_codes.size(1) != kSites ||
      site_codes.size(2) != kLatentDim) {
    throw ArgumentError("site codes must be a (batch, " + std::to_string(kSites) + ", " +
                        std::to_string(kLatentDim) + ") tensor");
  }
  int64_t batch = site_codes.size(0);
  auto x = const_input.expand({batch, -1, -1, -1, -1});
  for (int site = 0; site < kSites; ++site) {
    x = adain[site]->forward(x, site_codes.select(1, site));
    if (upsample_before[site]) x = upsample_nearest(x, {2, 2, 2});
    x = convs[site]->forward(x);
    if (site == kSites - 1) {
      x = torch::tanh(x);
    } else if (site != 6) {
      x = torch::leaky_relu(x, 0.2);
    }
  }
  return x;
}

// ----- struct{GBlock3d}(nn::Module) -----
GBlock3dImpl::GBlock3dImpl(int64_t in_channels, int64_t out_channels,
                           std::vector<int64_t> up_factor_)
    : up_factor(std::move(up_factor_)) {
  bn1 = register_module("bn1", torch::nn::BatchNorm3d(in_channels));
  bn2 = register_module("bn2", torch::nn::BatchNorm3d(out_channels));
  conv1 = register_module(
      "conv1", make_sn_conv3d(in_channels, out_channels, {3, 3, 3}, {1, 1, 1}, {1, 1, 1}));
  conv2 = register_module(
      "conv2", make_sn_conv3d(out_channels, out_channels, {3, 3, 3}, {1, 1, 1}, {1, 1, 1}));
  shortcut = register_module(
      "shortcut", make_sn_conv3d(in_channels, out_channels, {1, 1, 1}, {1, 1, 1}, {0, 0, 0}));
}

torch::Tensor GBlock3dImpl::forward(const torch::Tensor& x) {
  auto up = upsample_nearest(x, up_factor);
  auto h = torch::relu(bn1->forward(x));
  h = upsample_nearest(h, up_factor);
  h = conv1->forward(h);
  h = conv2->forward(torch::relu(bn2->forward(h)));
  return h + shortcut->forward(up);
}

// ----- struct{BigGan3dGenerator}(nn::Module) -----
BigGan3dGeneratorImpl::BigGan3dGeneratorImpl(const Rational& width) {
  int64_t c96 = width.scale(96), c48 = width.scale(48);
  int64_t c24 = width.scale(24), c12 = width.scale(12);
  stem_channels = c96;
  stem = register_module("stem", SNLinear(kLatentDim, c96 * 4 * 4 * 4));
  auto make_block = [](int64_t in, int64_t out, std::vector<int64_t> up) {
    return GBlock3d(std::make_shared<GBlock3dImpl>(in, out, std::move(up)));
  };
  blocks.push_back(register_module("block0", make_block(c96, c96, {1, 2, 2})));
  blocks.push_back(register_module("block1", make_block(c96, c48, {2, 2, 2})));
  blocks.push_back(register_module("block2", make_block(c48, c24, {2, 2, 2})));
  blocks.push_back(register_module("block3", make_block(c24, c12, {2, 2, 2})));
  attention = register_module("attention", SelfAttention3d(c96));
  head_bn = register_module("head_bn", torch::nn::BatchNorm3d(c12));
  head_conv = register_module("head_conv",
                              make_sn_conv3d(c12, 1, {3, 3, 3}, {1, 1, 1}, {1, 1, 1}));
}

torch::Tensor BigGan3dGeneratorImpl::forward(const torch::Tensor& z) {
  check_latents(z);
  auto x = stem->forward(z).reshape({z.size(0), stem_channels, 4, 4, 4});
  x = blocks[0]->forward(x);
  x = attention->forward(x);
  for (size_t i = 1; i < blocks.size(); ++i) x = blocks[i]->forward(x);
  return torch::tanh(head_conv->forward(torch::relu(head_bn->forward(x))));
}

// ----- handle -----
Generator::Generator(const GeneratorConfig& config) : config_(config) {
  switch (config.family) {
    case GanFamily::Dcgan: dcgan_ = Dcgan3dGenerator(config.width); break;
    case GanFamily::Stylegan: stylegan_ = StyleGan3dGenerator(config.width); break;
    case GanFamily::Biggan: biggan_ = BigGan3dGenerator(config.width); break;
  }
}

std::shared_ptr<torch::nn::Module> Generator::module() const {
  if (dcgan_) return dcgan_.ptr();
  if (stylegan_) return stylegan_.ptr();
  if (biggan_) return biggan_.ptr();
  throw ArgumentError("generator handle is empty");
}

int Generator::adain_sites() const {
  return stylegan_ ? StyleGan3dGeneratorImpl::kSites : 0;
}

int64_t Generator::parameter_count() const {
  int64_t total = 0;
  for (const auto& p : module()->parameters()) total += p.numel();
  return total;
}

torch::Tensor Generator::forward(const torch::Tensor& z) {
  if (dcgan_) return dcgan_->forward(z);
  if (stylegan_) return stylegan_->forward(z);
  return biggan_->forward(z);
}

torch::Tensor Generator::map_latent(const torch::Tensor& z) {
  if (!stylegan_) {
    throw UnsupportedOperationError("family '" + family_name(config_.family) +
                                    "' has no style mapping");
  }
  return stylegan_->map_latent(z);
}

torch::Tensor Generator::synthesize(const torch::Tensor& site_codes) {
  if (!stylegan_) {
    throw UnsupportedOperationError("family '" + family_name(config_.family) +
                                    "' has no style synthesis path");
  }
  return stylegan_->synthesize(site_codes);
}

torch::Tensor Generator::mixing_codes(const torch::Tensor& z1, const torch::Tensor& z2,
                                      const std::vector<int>& depths) {
  int sites = adain_sites();
  if (sites == 0) {
    throw UnsupportedOperationError("family '" + family_name(config_.family) +
                                    "' has no style mixing");
  }
  if (static_cast<int64_t>(depths.size()) != z1.size(0) || z1.sizes() != z2.sizes()) {
    throw ArgumentError("mixing needs matching latent batches and one depth per sample");
  }
  auto w1 = map_latent(z1).unsqueeze(1).expand({-1, sites, -1});
  auto w2 = map_latent(z2).unsqueeze(1).expand({-1, sites, -1});
  auto depth = torch::empty({z1.size(0), 1}, torch::kLong);
  for (size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] < 0 || depths[i] > sites) {
      throw ArgumentError("mixing depth must lie in [0, " + std::to_string(sites) + "]");
    }
    depth[static_cast<int64_t>(i)][0] = depths[i];
  }
  auto site_index = torch::arange(sites, torch::kLong).unsqueeze(0);
  auto use_first = (site_index < depth).unsqueeze(-1);  // (batch, sites, 1)
  return torch::where(use_first, w1, w2);
}

torch::Tensor Generator::generate_mixed(const torch::Tensor& z1, const torch::Tensor& z2,
                                        int depth) {
  std::vector<int> depths(static_cast<size_t>(z1.size(0)), depth);
  return synthesize(mixing_codes(z1, z2, depths));
}

std::vector<Patch> Generator::generate(int64_t count, uint64_t seed, int64_t batch) {
  torch::NoGradGuard no_grad;
  bool was_training = is_training();
  eval();
  auto gen = make_cpu_generator(seed);
  std::vector<Patch> patches;
  patches.reserve(static_cast<size_t>(count));
  while (static_cast<int64_t>(patches.size()) < count) {
    int64_t take = std::min(batch, count - static_cast<int64_t>(patches.size()));
    auto z = sample_latents(take, gen);
    for (auto& p : tensor_to_patches(forward(z))) patches.push_back(std::move(p));
  }
  train(was_training);
  return patches;
}

Generator build_generator(const GeneratorConfig& config) {
  torch::manual_seed(config.seed);
  return Generator(config);
}

torch::Generator make_cpu_generator(uint64_t seed) {
  auto gen = at::detail::createCPUGenerator(seed);
  return gen;
}

torch::Tensor sample_latents(int64_t count, torch::Generator& gen) {
  return torch::randn({count, kLatentDim}, gen, torch::dtype(torch::kFloat32));
}

torch::Tensor sample_latents(int64_t count, uint64_t seed) {
  auto gen = make_cpu_generator(seed);
  return sample_latents(count, gen);
}

torch::Tensor patches_to_tensor(const std::vector<Patch>& patches) {
  if (patches.empty()) throw ArgumentError("cannot pack an empty patch list");
  auto shape = patches.front().shape;
  auto t = torch::empty({static_cast<int64_t>(patches.size()), 1, shape[0], shape[1], shape[2]},
                        torch::kFloat32);
  int64_t item = shape[0] * shape[1] * shape[2];
  float* dst = t.data_ptr<float>();
  for (size_t i = 0; i < patches.size(); ++i) {
    if (patches[i].shape != shape) throw ArgumentError("patch shapes differ within the batch");
    std::copy(patches[i].data.begin(), patches[i].data.end(), dst + i * item);
  }
  return t;
}

std::vector<Patch> tensor_to_patches(const torch::Tensor& t) {
  auto x = t;
  if (x.dim() == 5) {
    if (x.size(1) != 1) throw ArgumentError("expected a single-channel volume tensor");
    x = x.squeeze(1);
  }
  if (x.dim() != 4) throw ArgumentError("expected a (n, d, h, w) or (n, 1, d, h, w) tensor");
  x = x.contiguous().to(torch::kFloat32);
  std::array<int64_t, 3> shape{x.size(1), x.size(2), x.size(3)};
  int64_t item = shape[0] * shape[1] * shape[2];
  const float* src = x.data_ptr<float>();
  std::vector<Patch> patches;
  patches.reserve(static_cast<size_t>(x.size(0)));
  for (int64_t i = 0; i < x.size(0); ++i) {
    Patch p(shape);
    std::copy(src + i * item, src + (i + 1) * item, p.data.begin());
    patches.push_back(std::move(p));
  }
  return patches;
}

GeneratorPatchSource::GeneratorPatchSource(Generator generator, uint64_t seed, int64_t batch)
    : generator_(std::move(generator)),
      seed_(seed),
      batch_(batch),
      rng_(make_cpu_generator(seed)) {}

int64_t GeneratorPatchSource::next(std::vector<Patch>& out, int64_t want) {
  torch::NoGradGuard no_grad;
  bool was_training = generator_.is_training();
  generator_.eval();
  int64_t made = 0;
  while (made < want) {
    int64_t take = std::min(batch_, want - made);
    auto z = sample_latents(take, rng_);
    for (auto& p : tensor_to_patches(generator_.forward(z))) out.push_back(std::move(p));
    made += take;
  }
  generator_.train(was_training);
  return made;
}

void GeneratorPatchSource::reset() { rng_ = make_cpu_generator(seed_); }

}  // namespace lunggan
