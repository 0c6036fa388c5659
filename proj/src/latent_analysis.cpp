#include "lunggan/latent_analysis.hpp"

#include <algorithm>

namespace lunggan {

namespace {

Eigen::MatrixXf to_eigen(const torch::Tensor& t) {
  auto x = t.contiguous().to(torch::kFloat32);
  Eigen::MatrixXf m(x.size(0), x.size(1));
  const float* src = x.data_ptr<float>();
  for (int64_t r = 0; r < x.size(0); ++r) {
    for (int64_t c = 0; c < x.size(1); ++c) m(r, c) = src[r * x.size(1) + c];
  }
  return m;
}

torch::Tensor to_torch(const Eigen::MatrixXf& m, int64_t row_begin, int64_t rows) {
  auto t = torch::empty({rows, m.cols()}, torch::kFloat32);
  float* dst = t.data_ptr<float>();
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < m.cols(); ++c) dst[r * m.cols() + c] = m(row_begin + r, c);
  }
  return t;
}

}  // namespace

LatentEmbedding embed_latents(Generator& generator, int64_t count, uint64_t seed,
                              const std::string& space, const std::string& reducer_spec,
                              int64_t chunk) {
  if (count < 2) throw ArgumentError("embedding needs at least 2 latents");
  if (space != "z" && space != "w") {
    throw ValidationError("latent.space", "expected 'z' or 'w', got '" + space + "'");
  }
  auto z = sample_latents(count, seed);
  torch::Tensor rows;
  if (space == "z") {
    rows = z;
  } else {
    torch::NoGradGuard no_grad;
    bool was_training = generator.is_training();
    generator.eval();
    std::vector<torch::Tensor> mapped;
    for (int64_t start = 0; start < count; start += chunk) {
      int64_t take = std::min(chunk, count - start);
      mapped.push_back(generator.map_latent(z.narrow(0, start, take)));
    }
    generator.train(was_training);
    rows = torch::cat(mapped, 0);
  }

  LatentEmbedding embedding;
  embedding.space = space;
  embedding.latents = to_eigen(rows);
  auto reducer = make_reducer(reducer_spec);
  embedding.reducer = reducer->name();
  auto coords = reducer->fit_transform(embedding.latents.cast<double>());
  embedding.points.resize(static_cast<size_t>(count));
  for (int64_t i = 0; i < count; ++i) {
    embedding.points[static_cast<size_t>(i)] =
        EmbeddingPoint{i, coords(i, 0), coords(i, 1), std::nullopt};
  }
  return embedding;
}

void label_with_branch_counts(Generator& generator, LatentEmbedding& embedding,
                              float threshold, int64_t chunk) {
  int64_t count = embedding.latents.rows();
  if (count == 0) throw ArgumentError("embedding has no latents to label");
  torch::NoGradGuard no_grad;
  bool was_training = generator.is_training();
  generator.eval();
  int sites = generator.adain_sites();
  for (int64_t start = 0; start < count; start += chunk) {
    int64_t take = std::min(chunk, count - start);
    auto codes = to_torch(embedding.latents, start, take);
    torch::Tensor patches;
    if (embedding.space == "w") {
      patches = generator.synthesize(codes.unsqueeze(1).expand({-1, sites, -1}));
    } else {
      patches = generator.forward(codes);
    }
    auto items = tensor_to_patches(patches);
    for (int64_t i = 0; i < take; ++i) {
      auto skeleton = skeletonize_patch(items[static_cast<size_t>(i)], threshold);
      embedding.points[static_cast<size_t>(start + i)].branch_count =
          count_branch_points(skeleton.mask).count;
    }
  }
  generator.train(was_training);
}

}  // namespace lunggan
