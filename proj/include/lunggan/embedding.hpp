#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lunggan/common.hpp"

namespace lunggan {

// Deterministic 2-D reduction of a latent matrix (rows = samples).
class Reducer {
 public:
  virtual ~Reducer() = default;
  virtual std::string name() const = 0;
  virtual Eigen::MatrixXd fit_transform(const Eigen::MatrixXd& rows) = 0;
};

// Projection onto the top-2 principal components; eigenvector signs are fixed
// so the coordinate with the largest magnitude is positive, making the output
// a pure function of the input.
class PcaReducer : public Reducer {
 public:
  std::string name() const override { return "pca"; }
  Eigen::MatrixXd fit_transform(const Eigen::MatrixXd& rows) override;
};

std::unique_ptr<Reducer> make_reducer(const std::string& spec);

struct EmbeddingPoint {
  int64_t latent_id = 0;
  double x = 0.0;
  double y = 0.0;
  std::optional<int> branch_count;
};

// 2-D map of latent samples; `latents` row i corresponds to points[i] and is
// kept so points can be re-rendered and labeled later.
struct LatentEmbedding {
  std::string space;  // "z" or "w"
  std::string reducer;
  Eigen::MatrixXf latents;
  std::vector<EmbeddingPoint> points;
};

// CSV columns: latent_id,x,y,branch_count (branch_count empty when unset).
// Coordinates round-trip losslessly.
void write_embedding_csv(const std::filesystem::path& path, const LatentEmbedding& embedding);
LatentEmbedding read_embedding_csv(const std::filesystem::path& path);

}  // namespace lunggan
