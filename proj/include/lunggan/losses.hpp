#pragma once

#include <torch/torch.h>

#include <string>

#include "lunggan/common.hpp"

namespace lunggan {

enum class GanLoss { Standard, Relativistic };

// Accepts "standard" or "relativistic"; throws ValidationError("train.loss").
GanLoss parse_loss(const std::string& name);
std::string loss_name(GanLoss kind);

// Non-saturating adversarial losses written in softplus form, which equals
// the sigmoid cross-entropy form but stays finite for large logits:
//   standard:    L_D = mean sp(-d_r) + mean sp(d_f),  L_G = mean sp(-d_f)
//   relativistic average: each logit is first shifted by the mean of the
//   opposite class, r~ = d_r - mean(d_f), f~ = d_f - mean(d_r), then
//   L_D = mean sp(-r~) + mean sp(f~),  L_G = mean sp(-f~) + mean sp(r~)
// Both inputs are (batch,) raw logits; empty batches throw ArgumentError.
torch::Tensor discriminator_loss(GanLoss kind, const torch::Tensor& d_real,
                                 const torch::Tensor& d_fake);
torch::Tensor generator_loss(GanLoss kind, const torch::Tensor& d_real,
                             const torch::Tensor& d_fake);

}  // namespace lunggan
