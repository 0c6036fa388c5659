#include "lunggan/losses.hpp"

namespace lunggan {

GanLoss parse_loss(const std::string& name) {
  if (name == "standard") return GanLoss::Standard;
  if (name == "relativistic") return GanLoss::Relativistic;
  throw ValidationError("train.loss",
                        "unknown loss '" + name + "' (expected standard, relativistic)");
}

std::string loss_name(GanLoss kind) {
  return kind == GanLoss::Standard ? "standard" : "relativistic";
}

namespace {

void check_logits(const torch::Tensor& d_real, const torch::Tensor& d_fake) {
  if (d_real.numel() == 0 || d_fake.numel() == 0) {
    throw ArgumentError("adversarial losses need non-empty logit batches");
  }
  if (d_real.dim() != 1 || d_fake.dim() != 1) {
    throw ArgumentError("adversarial losses expect (batch,) logit tensors");
  }
}

}  // namespace

torch::Tensor discriminator_loss(GanLoss kind, const torch::Tensor& d_real,
                                 const torch::Tensor& d_fake) {
  check_logits(d_real, d_fake);
  if (kind == GanLoss::Standard) {
    return torch::softplus(-d_real).mean() + torch::softplus(d_fake).mean();
  }
  auto rel_real = d_real - d_fake.mean();
  auto rel_fake = d_fake - d_real.mean();
  return torch::softplus(-rel_real).mean() + torch::softplus(rel_fake).mean();
}

torch::Tensor generator_loss(GanLoss kind, const torch::Tensor& d_real,
                             const torch::Tensor& d_fake) {
  check_logits(d_real, d_fake);
  if (kind == GanLoss::Standard) {
    return torch::softplus(-d_fake).mean();
  }
  auto rel_real = d_real - d_fake.mean();
  auto rel_fake = d_fake - d_real.mean();
  return torch::softplus(-rel_fake).mean() + torch::softplus(rel_real).mean();
}

}  // namespace lunggan
