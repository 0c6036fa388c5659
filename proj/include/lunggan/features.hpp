#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lunggan/fid.hpp"
#include "lunggan/volume.hpp"

namespace lunggan {

struct ExtractorInfo {
  std::string name;
  int input_rank = 2;      // 2 consumes central slices, 3 consumes whole patches
  int64_t feature_dim = 0;
};

// Packed batch of slices (rank 2, shape {n, h, w, -}) or patches
// (rank 3, shape {n, d, h, w}), row-major float.
struct ImageBatch {
  int rank = 2;
  std::array<int64_t, 4> shape{0, 0, 0, 0};
  std::vector<float> data;

  static ImageBatch from_slices(const std::vector<Image2D>& slices);
  static ImageBatch from_patches(const std::vector<Patch>& patches);
  int64_t count() const { return shape[0]; }
  int64_t item_size() const {
    return rank == 2 ? shape[1] * shape[2] : shape[1] * shape[2] * shape[3];
  }
};

// Maps an image batch to one feature row per item. Implementations must be
// deterministic functions of their inputs.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual ExtractorInfo info() const = 0;
  virtual Eigen::MatrixXd extract(const ImageBatch& batch) const = 0;
};

// Average pooling on a g x g grid of a 2-D slice -> g*g features.
class MeanPool2dExtractor : public FeatureExtractor {
 public:
  explicit MeanPool2dExtractor(int grid = 8);
  ExtractorInfo info() const override;
  Eigen::MatrixXd extract(const ImageBatch& batch) const override;

 private:
  int grid_;
};

// Average pooling on a g x g x g grid of a 3-D patch -> g^3 features.
class MeanPool3dExtractor : public FeatureExtractor {
 public:
  explicit MeanPool3dExtractor(int grid = 4);
  ExtractorInfo info() const override;
  Eigen::MatrixXd extract(const ImageBatch& batch) const override;

 private:
  int grid_;
};

// y = W x over the flattened item; W comes from a matrix container file.
class LinearProjectionExtractor : public FeatureExtractor {
 public:
  LinearProjectionExtractor(int rank, Eigen::MatrixXd projection, std::string name);
  ExtractorInfo info() const override;
  Eigen::MatrixXd extract(const ImageBatch& batch) const override;

 private:
  int rank_;
  Eigen::MatrixXd projection_;
  std::string name_;
};

// Wraps a serialized TorchScript network. Rank-2 slices are replicated to
// `channels` and bilinearly resized to `input_size` when those are set; when
// the network returns a spatial map it is averaged over space. The 512-d
// spatially averaged convolutional path used for volumetric comparisons is
// exactly this with a rank-3 network returning (n, c, d', h', w').
std::unique_ptr<FeatureExtractor> make_torchscript_extractor(
    const std::filesystem::path& path, int rank, int64_t input_size = 0,
    int64_t channels = 1);

// Spec strings: "pool2d[:grid]", "pool3d[:grid]", "proj2d:<file>",
// "proj3d:<file>", "ts2d:<file>[:size[:channels]]", "ts3d:<file>".
std::unique_ptr<FeatureExtractor> make_extractor(const std::string& spec);

// Streaming source of patches; next() returns how many it appended
// (0 = exhausted).
class PatchSource {
 public:
  virtual ~PatchSource() = default;
  virtual int64_t next(std::vector<Patch>& out, int64_t want) = 0;
  virtual void reset() = 0;
};

class VectorPatchSource : public PatchSource {
 public:
  explicit VectorPatchSource(std::vector<Patch> patches);
  int64_t next(std::vector<Patch>& out, int64_t want) override;
  void reset() override;

 private:
  std::vector<Patch> patches_;
  size_t cursor_ = 0;
};

// Reads every *.vol / *.mhd file in a directory, sorted by name.
class DirectoryPatchSource : public PatchSource {
 public:
  explicit DirectoryPatchSource(const std::filesystem::path& dir);
  int64_t next(std::vector<Patch>& out, int64_t want) override;
  void reset() override;

 private:
  std::vector<std::filesystem::path> files_;
  size_t cursor_ = 0;
};

// Streams n patches from each source through the extractor (rank-2
// extractors see central slices) and returns one feature row per patch.
Eigen::MatrixXd extract_features(PatchSource& source, const FeatureExtractor& extractor,
                                 int64_t n, int64_t batch = 64);

struct FidResult {
  double value = 0.0;
  int64_t n_real = 0;
  int64_t n_fake = 0;
  ExtractorInfo extractor;
};

// Fréchet distance between Gaussian fits of extractor features from the two
// sources. Throws LoadError when a source yields fewer than n patches.
FidResult compute_fid(PatchSource& real, PatchSource& fake,
                      const FeatureExtractor& extractor, int64_t n, int64_t batch = 64);

// --- Binary matrix container (magic + dims + float64 payload) ---
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace lunggan
