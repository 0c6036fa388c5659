#include <torch/script.h>
#include <torch/torch.h>

#include "lunggan/features.hpp"

namespace lunggan {

namespace {

class TorchScriptExtractor : public FeatureExtractor {
 public:
  TorchScriptExtractor(const std::filesystem::path& path, int rank, int64_t input_size,
                       int64_t channels)
      : rank_(rank), input_size_(input_size), channels_(channels) {
    if (rank_ != 2 && rank_ != 3) throw ArgumentError("network rank must be 2 or 3");
    if (channels_ < 1) throw ArgumentError("channel replication count must be positive");
    try {
      module_ = torch::jit::load(path.string());
    } catch (const c10::Error& e) {
      throw LoadError("cannot load network file " + path.string() + ": " + e.what_without_backtrace());
    }
    module_.eval();
    name_ = (rank_ == 2 ? "ts2d:" : "ts3d:") + path.filename().string();
    feature_dim_ = probe_dim();
  }

  ExtractorInfo info() const override { return {name_, rank_, feature_dim_}; }

  Eigen::MatrixXd extract(const ImageBatch& batch) const override {
    if (batch.rank != rank_) {
      throw ArgumentError("extractor " + name_ + " expects rank-" + std::to_string(rank_) +
                          " input, got rank " + std::to_string(batch.rank));
    }
    torch::NoGradGuard no_grad;
    torch::Tensor features = run(to_tensor(batch));
    if (features.size(0) != batch.shape[0]) {
      throw NumericalError("network returned " + std::to_string(features.size(0)) +
                           " rows for " + std::to_string(batch.shape[0]) + " inputs");
    }
    features = features.to(torch::kFloat64).contiguous();
    Eigen::MatrixXd out(features.size(0), features.size(1));
    auto acc = features.accessor<double, 2>();
    for (int64_t i = 0; i < features.size(0); ++i)
      for (int64_t j = 0; j < features.size(1); ++j) out(i, j) = acc[i][j];
    return out;
  }

 private:
  torch::Tensor to_tensor(const ImageBatch& batch) const {
    torch::Tensor x;
    if (rank_ == 2) {
      x = torch::from_blob(const_cast<float*>(batch.data.data()),
                           {batch.shape[0], 1, batch.shape[1], batch.shape[2]},
                           torch::kFloat32)
              .clone();
      if (channels_ > 1) x = x.repeat({1, channels_, 1, 1});
      if (input_size_ > 0 && (x.size(2) != input_size_ || x.size(3) != input_size_)) {
        x = torch::nn::functional::interpolate(
            x, torch::nn::functional::InterpolateFuncOptions()
                   .size(std::vector<int64_t>{input_size_, input_size_})
                   .mode(torch::kBilinear)
                   .align_corners(false));
      }
    } else {
      x = torch::from_blob(const_cast<float*>(batch.data.data()),
                           {batch.shape[0], 1, batch.shape[1], batch.shape[2], batch.shape[3]},
                           torch::kFloat32)
              .clone();
      if (channels_ > 1) x = x.repeat({1, channels_, 1, 1, 1});
    }
    return x;
  }

  torch::Tensor run(torch::Tensor x) const {
    torch::Tensor y;
    try {
      y = module_.forward({x}).toTensor();
    } catch (const c10::Error& e) {
      throw NumericalError("network forward failed: " + std::string(e.what_without_backtrace()));
    }
    // Spatial maps are averaged over all trailing spatial axes.
    while (y.dim() > 2) y = y.mean(-1);
    if (y.dim() == 1) y = y.unsqueeze(1);
    return y;
  }

  int64_t probe_dim() {
    torch::NoGradGuard no_grad;
    ImageBatch probe;
    if (rank_ == 2) {
      int64_t s = input_size_ > 0 ? input_size_ : kPatchHeight;
      probe.rank = 2;
      probe.shape = {1, s, s, 0};
      probe.data.assign(static_cast<size_t>(s * s), 0.0f);
    } else {
      probe.rank = 3;
      probe.shape = {1, kPatchDepth, kPatchHeight, kPatchWidth};
      probe.data.assign(static_cast<size_t>(kPatchVoxels), 0.0f);
    }
    return run(to_tensor(probe)).size(1);
  }

  mutable torch::jit::script::Module module_;
  int rank_;
  int64_t input_size_;
  int64_t channels_;
  int64_t feature_dim_ = 0;
  std::string name_;
};

}  // namespace

std::unique_ptr<FeatureExtractor> make_torchscript_extractor(
    const std::filesystem::path& path, int rank, int64_t input_size, int64_t channels) {
  return std::make_unique<TorchScriptExtractor>(path, rank, input_size, channels);
}

}  // namespace lunggan
