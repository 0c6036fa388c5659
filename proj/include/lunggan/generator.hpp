#pragma once

#include <torch/torch.h>

#include <memory>
#include <string>
#include <vector>

#include "lunggan/common.hpp"
#include "lunggan/features.hpp"
#include "lunggan/nn.hpp"
#include "lunggan/volume.hpp"

namespace lunggan {

enum class GanFamily { Dcgan, Stylegan, Biggan };

// Accepts "dcgan", "stylegan", "biggan"; throws ValidationError("model.family").
GanFamily parse_family(const std::string& name);
std::string family_name(GanFamily family);

struct GeneratorConfig {
  GanFamily family = GanFamily::Dcgan;
  Rational width{1, 1};  // multiplies every internal channel count
  uint64_t seed = 7;
};

// ----- struct{Dcgan3dGenerator}(nn::Module) -----
// Five transposed convolutions growing a (latent, 1, 1, 1) seed into a
// (1, 32, 64, 64) patch; batch norm + ReLU between stages, tanh output.
struct Dcgan3dGeneratorImpl : torch::nn::Module {
  explicit Dcgan3dGeneratorImpl(const Rational& width);
  torch::Tensor forward(const torch::Tensor& z);

  torch::nn::ConvTranspose3d up1{nullptr}, up2{nullptr}, up3{nullptr}, up4{nullptr},
      up5{nullptr};
  torch::nn::BatchNorm3d bn1{nullptr}, bn2{nullptr}, bn3{nullptr}, bn4{nullptr};
};
TORCH_MODULE(Dcgan3dGenerator);

// ----- struct{StyleGan3dGenerator}(nn::Module) -----
// Style-based synthesis: a learned constant (latent, 1, 2, 2) block passes
// through 11 sites of [adaptive instance norm -> (odd sites only) 2x nearest
// upsample -> 3^3 conv]; the style code comes from a 9-layer mapping network
// shared across sites. Sites 0..5 and 7..9 end in leaky ReLU, site 6 has no
// activation, site 10 ends in tanh.
struct StyleGan3dGeneratorImpl : torch::nn::Module {
  static constexpr int kSites = 11;

  explicit StyleGan3dGeneratorImpl(const Rational& width);
  torch::Tensor forward(const torch::Tensor& z);
  torch::Tensor map_latent(const torch::Tensor& z);
  // site_codes: (batch, kSites, latent), one style code per site.
  torch::Tensor synthesize(const torch::Tensor& site_codes);

  MappingNetwork mapping{nullptr};
  torch::Tensor const_input;
  std::vector<AdaIn3d> adain;
  std::vector<torch::nn::Conv3d> convs;
  std::vector<bool> upsample_before;
};
TORCH_MODULE(StyleGan3dGenerator);

// ----- struct{GBlock3d}(nn::Module) -----
// Pre-activation residual upsampling block with spectrally normalized convs;
// the shortcut is a 1^3 conv applied to the upsampled input.
struct GBlock3dImpl : torch::nn::Module {
  GBlock3dImpl(int64_t in_channels, int64_t out_channels, std::vector<int64_t> up_factor);
  torch::Tensor forward(const torch::Tensor& x);

  torch::nn::BatchNorm3d bn1{nullptr}, bn2{nullptr};
  SNConv3d conv1{nullptr}, conv2{nullptr}, shortcut{nullptr};
  std::vector<int64_t> up_factor;
};
TORCH_MODULE(GBlock3d);

// ----- struct{BigGan3dGenerator}(nn::Module) -----
// Spectrally normalized residual generator: linear stem to a (8c, 4, 4, 4)
// grid, four residual up blocks (anisotropic first step keeps the 1:2 depth
// aspect), self-attention after the first block, plain conv head.
struct BigGan3dGeneratorImpl : torch::nn::Module {
  explicit BigGan3dGeneratorImpl(const Rational& width);
  torch::Tensor forward(const torch::Tensor& z);

  SNLinear stem{nullptr};
  std::vector<GBlock3d> blocks;
  SelfAttention3d attention{nullptr};
  torch::nn::BatchNorm3d head_bn{nullptr};
  SNConv3d head_conv{nullptr};
  int64_t stem_channels = 0;
};
TORCH_MODULE(BigGan3dGenerator);

// Family-dispatching handle. Copies share the underlying modules.
class Generator {
 public:
  Generator() = default;
  explicit Generator(const GeneratorConfig& config);

  const GeneratorConfig& config() const { return config_; }
  GanFamily family() const { return config_.family; }
  // Number of style injection sites (0 for families without styles).
  int adain_sites() const;
  int64_t parameter_count() const;
  std::shared_ptr<torch::nn::Module> module() const;
  bool is_training() const { return module()->is_training(); }
  void train(bool on = true) { module()->train(on); }
  void eval() { module()->eval(); }

  // (batch, latent) -> (batch, 1, 32, 64, 64), all families.
  torch::Tensor forward(const torch::Tensor& z);
  // Style families only; others throw UnsupportedOperationError.
  torch::Tensor map_latent(const torch::Tensor& z);
  torch::Tensor synthesize(const torch::Tensor& site_codes);
  // Per-sample mixing: sample i takes the code of z1 at sites < depths[i]
  // and of z2 from depths[i] on. depth 0 is pure z2, depth kSites pure z1.
  torch::Tensor mixing_codes(const torch::Tensor& z1, const torch::Tensor& z2,
                             const std::vector<int>& depths);
  torch::Tensor generate_mixed(const torch::Tensor& z1, const torch::Tensor& z2, int depth);

  // Deterministic no-grad sampling convenience; leaves the train/eval mode
  // as it found it.
  std::vector<Patch> generate(int64_t count, uint64_t seed, int64_t batch = 16);

  StyleGan3dGenerator style_module() const { return stylegan_; }
  BigGan3dGenerator biggan_module() const { return biggan_; }
  Dcgan3dGenerator dcgan_module() const { return dcgan_; }

 private:
  GeneratorConfig config_;
  Dcgan3dGenerator dcgan_{nullptr};
  StyleGan3dGenerator stylegan_{nullptr};
  BigGan3dGenerator biggan_{nullptr};
};

// Seeds libtorch's global RNG with config.seed before construction so
// freshly initialized weights are reproducible.
Generator build_generator(const GeneratorConfig& config);

// Standard normal latents from a private CPU generator (global RNG untouched).
torch::Tensor sample_latents(int64_t count, uint64_t seed);
torch::Tensor sample_latents(int64_t count, torch::Generator& gen);
torch::Generator make_cpu_generator(uint64_t seed);

// (n, 1, d, h, w) float32 <-> patch vectors; accepts (n, d, h, w) too.
torch::Tensor patches_to_tensor(const std::vector<Patch>& patches);
std::vector<Patch> tensor_to_patches(const torch::Tensor& t);

// Endless source drawing fresh latents through a generator; reset() rewinds
// the latent stream to the seed.
class GeneratorPatchSource : public PatchSource {
 public:
  GeneratorPatchSource(Generator generator, uint64_t seed, int64_t batch = 16);
  int64_t next(std::vector<Patch>& out, int64_t want) override;
  void reset() override;

 private:
  Generator generator_;
  uint64_t seed_;
  int64_t batch_;
  torch::Generator rng_;
};

}  // namespace lunggan
