#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "lunggan/embedding.hpp"
#include "lunggan/latent_analysis.hpp"

#include "testing.hpp"

using namespace lunggan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  auto dir = fs::temp_directory_path() /
             (std::string("lunggan_embed_") + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

Generator small_style_generator() {
  GeneratorConfig cfg;
  cfg.family = GanFamily::Stylegan;
  cfg.width = Rational{1, 8};
  cfg.seed = 31;
  return build_generator(cfg);
}

}  // namespace

TEST_SUITE("embedding") {

TEST_CASE("the reduction is a pure function of its input") {
  std::mt19937_64 rng(3);
  auto rows = random_matrix(rng, 40, 8);
  PcaReducer first, second;
  auto a = first.fit_transform(rows);
  auto b = second.fit_transform(rows);
  REQUIRE(a.rows() == 40);
  REQUIRE(a.cols() == 2);
  CHECK((a - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("reduction of planar data preserves pairwise distances") {
  // Rows live exactly in a 2-d subspace of R^10, so the top-2 projection is
  // an isometry on them.
  std::mt19937_64 rng(5);
  auto coords = random_matrix(rng, 30, 2);
  auto basis = random_matrix(rng, 2, 10);
  Eigen::MatrixXd rows = coords * basis;
  PcaReducer pca;
  auto reduced = pca.fit_transform(rows);
  for (int i = 0; i < rows.rows(); ++i)
    for (int j = i + 1; j < rows.rows(); ++j) {
      double original = (rows.row(i) - rows.row(j)).norm();
      double projected = (reduced.row(i) - reduced.row(j)).norm();
      CHECK(projected == doctest::Approx(original).epsilon(1e-9));
    }
}

TEST_CASE("the first axis recovers the dominant direction of stretched data") {
  // Strongly anisotropic 3-d cloud: x spread 100, y spread 1, z spread 0.01.
  std::mt19937_64 rng(7);
  Eigen::MatrixXd rows = random_matrix(rng, 200, 3);
  rows.col(0) *= 100.0;
  rows.col(2) *= 0.01;
  PcaReducer pca;
  auto reduced = pca.fit_transform(rows);
  Eigen::VectorXd centered = rows.col(0).array() - rows.col(0).mean();
  // PC1 equals the centered dominant coordinate up to a tiny contamination.
  CHECK((reduced.col(0) - centered).norm() / centered.norm() < 0.01);
  // The sign convention orients it positively, not mirrored.
  Eigen::Index peak;
  reduced.col(0).cwiseAbs().maxCoeff(&peak);
  CHECK(reduced(peak, 0) * centered(peak) > 0.0);
}

TEST_CASE("degenerate reductions are rejected") {
  PcaReducer pca;
  CHECK_THROWS_AS(pca.fit_transform(Eigen::MatrixXd::Zero(1, 5)), ArgumentError);
  CHECK_THROWS_AS(pca.fit_transform(Eigen::MatrixXd::Zero(5, 1)), ArgumentError);
  CHECK(make_reducer("pca")->name() == "pca");
  try {
    make_reducer("umap");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.key == "reducer");
  }
}

TEST_CASE("embedding tables round trip losslessly") {
  auto dir = temp_dir("csv");
  LatentEmbedding emb;
  emb.space = "z";
  emb.reducer = "pca";
  emb.points = {
      {0, 1.0 / 3.0, -2.0 / 7.0, std::nullopt},
      {1, 1e-17, 12345.678901234567, 4},
      {2, -0.0, 3.0, 0},
  };
  write_embedding_csv(dir / "map.csv", emb);
  auto back = read_embedding_csv(dir / "map.csv");
  REQUIRE(back.points.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(back.points[i].latent_id == emb.points[i].latent_id);
    CHECK(back.points[i].x == emb.points[i].x);  // bitwise via %.17g
    CHECK(back.points[i].y == emb.points[i].y);
    CHECK(back.points[i].branch_count == emb.points[i].branch_count);
  }
  std::ofstream(dir / "bad.csv") << "latent_id,x,y,branch_count\n0,1.5\n";
  CHECK_THROWS_AS(read_embedding_csv(dir / "bad.csv"), LoadError);
  CHECK_THROWS_AS(read_embedding_csv(dir / "missing.csv"), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("latent embeddings validate their space and stay deterministic") {
  auto generator = small_style_generator();
  auto emb = embed_latents(generator, 24, 51, "z", "pca");
  CHECK(emb.space == "z");
  CHECK(emb.reducer == "pca");
  CHECK(emb.latents.rows() == 24);
  CHECK(emb.latents.cols() == kLatentDim);
  REQUIRE(emb.points.size() == 24);
  for (size_t i = 0; i < emb.points.size(); ++i) {
    CHECK(emb.points[i].latent_id == static_cast<int64_t>(i));
    CHECK_FALSE(emb.points[i].branch_count.has_value());
  }

  auto again = embed_latents(generator, 24, 51, "z", "pca");
  for (size_t i = 0; i < emb.points.size(); ++i) {
    CHECK(emb.points[i].x == again.points[i].x);
    CHECK(emb.points[i].y == again.points[i].y);
  }
  auto other = embed_latents(generator, 24, 52, "z", "pca");
  bool any_differs = false;
  for (size_t i = 0; i < emb.points.size(); ++i)
    any_differs = any_differs || other.points[i].x != emb.points[i].x;
  CHECK(any_differs);

  // The style space runs the same latents through the mapping network.
  auto w = embed_latents(generator, 24, 51, "w", "pca");
  CHECK(w.latents.rows() == 24);
  CHECK(w.latents.cols() == kLatentDim);
  bool mapped_differs = false;
  auto z_latents = emb.latents;
  for (int i = 0; i < w.latents.rows() && !mapped_differs; ++i)
    mapped_differs = (w.latents.row(i) - z_latents.row(i)).cwiseAbs().maxCoeff() > 1e-6f;
  CHECK(mapped_differs);

  try {
    embed_latents(generator, 24, 51, "latent", "pca");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.key == "latent.space");
  }
  CHECK_THROWS_AS(embed_latents(generator, 1, 51, "z", "pca"), ArgumentError);

  GeneratorConfig dcgan_cfg;
  dcgan_cfg.family = GanFamily::Dcgan;
  dcgan_cfg.width = Rational{1, 8};
  auto dcgan = build_generator(dcgan_cfg);
  CHECK_THROWS_AS(embed_latents(dcgan, 8, 51, "w", "pca"), UnsupportedOperationError);
}

TEST_CASE("branch labeling matches the direct per-latent pipeline") {
  auto generator = small_style_generator();
  auto emb = embed_latents(generator, 6, 77, "z", "pca");
  const float threshold = 0.4f;
  label_with_branch_counts(generator, emb, threshold, 4);
  for (const auto& p : emb.points) {
    REQUIRE(p.branch_count.has_value());
    CHECK(*p.branch_count >= 0);
  }

  // Recompute one label by hand from the stored latent.
  generator.eval();
  torch::NoGradGuard no_grad;
  auto z = torch::zeros({1, kLatentDim});
  for (int64_t j = 0; j < kLatentDim; ++j) z[0][j] = emb.latents(2, j);
  auto patches = tensor_to_patches(generator.forward(z));
  auto skeleton = skeletonize_patch(patches[0], threshold);
  CHECK(*emb.points[2].branch_count == count_branch_points(skeleton.mask).count);

  LatentEmbedding hollow;
  CHECK_THROWS_AS(label_with_branch_counts(generator, hollow, 0.4f), ArgumentError);
}

}  // TEST_SUITE
