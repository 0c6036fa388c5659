#include <torch/torch.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lunggan/common.hpp"
#include "lunggan/discriminator.hpp"
#include "lunggan/generator.hpp"
#include "lunggan/minibatch.hpp"

#include "testing.hpp"

using namespace lunggan;

namespace {

// Plain loops as the reference for the tensor implementation.
std::vector<std::vector<double>> loop_pairwise(const torch::Tensor& f) {
  int64_t n = f.size(0), d = f.size(1);
  auto acc = f.accessor<float, 2>();
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int64_t k = 0; k < d; ++k) {
        sum += std::abs(static_cast<double>(acc[i][k]) - static_cast<double>(acc[j][k]));
      }
      out[i][j] = sum;
    }
  }
  return out;
}

std::vector<double> loop_mdmin(const torch::Tensor& f) {
  auto dist = loop_pairwise(f);
  std::vector<double> out(dist.size());
  for (size_t i = 0; i < dist.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < dist.size(); ++j) {
      if (j != i) best = std::min(best, dist[i][j]);
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

TEST_SUITE("minibatch") {

TEST_CASE("distances and nearest-neighbour scores on a hand example") {
  auto f = torch::tensor({{0.0f}, {2.0f}, {6.0f}});
  auto dist = pairwise_l1(f);
  auto expected = torch::tensor({{0.0f, 2.0f, 6.0f}, {2.0f, 0.0f, 4.0f}, {6.0f, 4.0f, 0.0f}});
  CHECK(torch::equal(dist, expected));

  auto scores = mdmin_scores(f);
  CHECK(torch::equal(scores, torch::tensor({2.0f, 2.0f, 4.0f})));
}

TEST_CASE("tensor implementation matches the loop reference") {
  auto gen = make_cpu_generator(41);
  for (int rep = 0; rep < 5; ++rep) {
    int64_t n = 3 + rep * 4, d = 1 + rep * 7;
    auto f = torch::randn({n, d}, gen, torch::dtype(torch::kFloat32));
    auto dist = pairwise_l1(f);
    auto ref = loop_pairwise(f);
    auto acc = dist.accessor<float, 2>();
    for (int64_t i = 0; i < n; ++i) {
      for (int64_t j = 0; j < n; ++j) {
        CHECK(acc[i][j] == doctest::Approx(ref[i][j]).epsilon(1e-5));
      }
    }

    auto scores = mdmin_scores(f);
    auto refs = loop_mdmin(f);
    for (int64_t i = 0; i < n; ++i) {
      CHECK(scores[i].item<double>() == doctest::Approx(refs[i]).epsilon(1e-5));
    }
  }
}

TEST_CASE("distance matrix properties") {
  auto gen = make_cpu_generator(42);
  auto f = torch::randn({9, 5}, gen, torch::dtype(torch::kFloat32));
  auto dist = pairwise_l1(f);
  CHECK(torch::equal(dist, dist.t()));
  CHECK(dist.diagonal().abs().max().item<double>() == 0.0);
  CHECK(dist.min().item<double>() >= 0.0);
  CHECK(mdmin_scores(f).min().item<double>() > 0.0);
}

TEST_CASE("row chunking never changes the result") {
  auto gen = make_cpu_generator(43);
  auto f = torch::randn({10, 6}, gen, torch::dtype(torch::kFloat32));
  auto base = pairwise_l1(f, 10);
  for (int64_t chunk : {1, 2, 3, 7, 16, 100}) {
    CHECK(torch::equal(pairwise_l1(f, chunk), base));
    CHECK(torch::equal(mdmin_scores(f, chunk), mdmin_scores(f, 10)));
  }
}

TEST_CASE("malformed distance inputs are rejected") {
  CHECK_THROWS_AS(pairwise_l1(torch::zeros({4})), ArgumentError);
  CHECK_THROWS_AS(pairwise_l1(torch::zeros({1, 4})), ArgumentError);
  CHECK_THROWS_AS(pairwise_l1(torch::zeros({4, 4}), 0), ArgumentError);
  CHECK_THROWS_AS(mdmin_scores(torch::zeros({1, 4})), ArgumentError);
}

TEST_CASE("selection keeps the most redundant rows") {
  auto f = torch::tensor({{0.0f}, {0.25f}, {5.0f}, {9.0f}, {20.0f}});
  CHECK(largeebs_select_from(f, 2) == std::vector<int64_t>{0, 1});
  CHECK(largeebs_select_from(f, 4) == std::vector<int64_t>{0, 1, 2, 3});
  CHECK(largeebs_select_from(f, 5) == std::vector<int64_t>{0, 1, 2, 3, 4});
}

TEST_CASE("selection ties break toward the lower index") {
  // Two duplicate pairs and an equally spaced ladder both give level scores.
  auto dupes = torch::tensor({{7.0f}, {7.0f}, {1.0f}, {1.0f}});
  CHECK(largeebs_select_from(dupes, 2) == std::vector<int64_t>{0, 1});

  auto ladder = torch::tensor({{0.0f}, {1.0f}, {2.0f}, {3.0f}});
  CHECK(largeebs_select_from(ladder, 3) == std::vector<int64_t>{0, 1, 2});
}

TEST_CASE("selection orders by ascending score before index") {
  auto f = torch::tensor({{0.0f}, {30.0f}, {30.5f}, {10.0f}, {8.0f}});
  // Scores: 8, 0.5, 0.5, 2, 2. Ascending with index ties: 1, 2, 3, 4, 0.
  CHECK(largeebs_select_from(f, 5) == std::vector<int64_t>{1, 2, 3, 4, 0});
}

TEST_CASE("selection validates the keep count") {
  auto f = torch::zeros({4, 2});
  CHECK_THROWS_AS(largeebs_select_from(f, 0), ArgumentError);
  CHECK_THROWS_AS(largeebs_select_from(f, 5), ArgumentError);
}

TEST_CASE("the full selection pass picks candidate rows by tapped features") {
  GeneratorConfig gc;
  gc.family = GanFamily::Dcgan;
  gc.width = Rational{1, 8};
  gc.seed = 51;
  auto generator = build_generator(gc);

  DiscriminatorConfig dc;
  dc.width = Rational{1, 8};
  dc.seed = 52;
  auto discriminator = build_discriminator(dc);

  LargeEbsConfig cfg;
  cfg.candidate_count = 12;
  cfg.keep_count = 4;
  cfg.tap_layer = 4;

  auto candidates = sample_latents(12, 53);
  generator.train();
  discriminator.train();
  auto picked = largeebs_select(generator, discriminator, candidates, cfg);

  CHECK(picked.sizes() == torch::IntArrayRef({4, kLatentDim}));
  CHECK_FALSE(picked.requires_grad());
  CHECK(generator.is_training());
  CHECK(discriminator.is_training());

  // Recompute the pass from public pieces.
  torch::NoGradGuard no_grad;
  generator.eval();
  discriminator.eval();
  auto features = discriminator.features_at_layer(generator.forward(candidates), 4);
  auto order = largeebs_select_from(features, 4);
  for (int64_t i = 0; i < 4; ++i) {
    CHECK(torch::equal(picked[i], candidates[order[static_cast<size_t>(i)]]));
  }
}

TEST_CASE("the full selection pass validates its candidate batch") {
  GeneratorConfig gc;
  gc.family = GanFamily::Dcgan;
  gc.width = Rational{1, 8};
  auto generator = build_generator(gc);
  DiscriminatorConfig dc;
  dc.width = Rational{1, 8};
  auto discriminator = build_discriminator(dc);

  LargeEbsConfig cfg;
  cfg.candidate_count = 8;
  cfg.keep_count = 2;
  CHECK_THROWS_AS(largeebs_select(generator, discriminator, sample_latents(7, 1), cfg),
                  ArgumentError);
  CHECK_THROWS_AS(largeebs_select(generator, discriminator, torch::zeros({kLatentDim}), cfg),
                  ArgumentError);
}

TEST_CASE("selection defaults") {
  LargeEbsConfig cfg;
  CHECK(cfg.candidate_count == 192);
  CHECK(cfg.keep_count == 48);
  CHECK(cfg.warmup_epochs == 5);
  CHECK(cfg.tap_layer == 4);
}

}  // TEST_SUITE
