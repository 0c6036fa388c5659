#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "lunggan/features.hpp"
#include "lunggan/volume.hpp"

#include "testing.hpp"

using namespace lunggan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  auto dir = fs::temp_directory_path() /
             (std::string("lunggan_features_") + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Patch indexed_patch(float scale) {
  Patch p({kPatchDepth, kPatchHeight, kPatchWidth});
  for (int64_t z = 0; z < kPatchDepth; ++z)
    for (int64_t y = 0; y < kPatchHeight; ++y)
      for (int64_t x = 0; x < kPatchWidth; ++x)
        p.at(z, y, x) = scale * static_cast<float>((z + 2 * y + 3 * x) % 17) / 17.0f;
  return p;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("2-d mean pooling averages each grid block exactly") {
  Image2D img(4, 4);
  float v = 0.0f;
  for (auto& cell : img.data) cell = v++;  // 0..15 row-major
  auto batch = ImageBatch::from_slices({img});
  CHECK(batch.rank == 2);
  CHECK(batch.shape[0] == 1);

  MeanPool2dExtractor pool(2);
  CHECK(pool.info().feature_dim == 4);
  auto f = pool.extract(batch);
  REQUIRE(f.rows() == 1);
  REQUIRE(f.cols() == 4);
  // blocks: rows {0,1} x cols {0,1} etc.
  CHECK(f(0, 0) == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
  CHECK(f(0, 1) == doctest::Approx((2 + 3 + 6 + 7) / 4.0));
  CHECK(f(0, 2) == doctest::Approx((8 + 9 + 12 + 13) / 4.0));
  CHECK(f(0, 3) == doctest::Approx((10 + 11 + 14 + 15) / 4.0));

  MeanPool2dExtractor whole(1);
  CHECK(whole.extract(batch)(0, 0) == doctest::Approx(7.5));
}

TEST_CASE("3-d mean pooling averages each grid cell exactly") {
  Patch p({2, 2, 2});
  float v = 0.0f;
  for (auto& cell : p.data) cell = v++;  // 0..7
  auto batch = ImageBatch::from_patches({p});
  CHECK(batch.rank == 3);

  MeanPool3dExtractor pool(2);
  CHECK(pool.info().feature_dim == 8);
  auto f = pool.extract(batch);
  for (int i = 0; i < 8; ++i) CHECK(f(0, i) == doctest::Approx(static_cast<double>(i)));

  MeanPool3dExtractor whole(1);
  CHECK(whole.extract(batch)(0, 0) == doctest::Approx(3.5));
}

TEST_CASE("rank mismatches are rejected") {
  Image2D img(8, 8, 0.0f);
  auto slices = ImageBatch::from_slices({img});
  MeanPool3dExtractor pool3(2);
  CHECK_THROWS_AS(pool3.extract(slices), ArgumentError);
  Patch p({4, 4, 4}, 0.0f);
  auto patches = ImageBatch::from_patches({p});
  MeanPool2dExtractor pool2(2);
  CHECK_THROWS_AS(pool2.extract(patches), ArgumentError);
}

TEST_CASE("linear projection multiplies the flattened item") {
  Image2D img(1, 3);
  img.data = {1.0f, 2.0f, 3.0f};
  Eigen::MatrixXd w(2, 3);
  w << 1, 0, 1,
       0, 2, 0;
  LinearProjectionExtractor proj(2, w, "proj-test");
  auto f = proj.extract(ImageBatch::from_slices({img}));
  CHECK(f(0, 0) == doctest::Approx(4.0));
  CHECK(f(0, 1) == doctest::Approx(4.0));

  Image2D wrong(2, 3, 0.0f);
  CHECK_THROWS_AS(proj.extract(ImageBatch::from_slices({wrong})), ArgumentError);
}

TEST_CASE("matrix container round trips and rejects damage") {
  auto dir = temp_dir("matrix");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd m(5, 7);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = n(rng);
  auto file = dir / "m.mat";
  write_matrix(file, m);
  auto back = read_matrix(file);
  REQUIRE(back.rows() == 5);
  REQUIRE(back.cols() == 7);
  CHECK((back - m).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

  std::ofstream bad(dir / "bad.mat", std::ios::binary);
  bad << "NOTAMATRIX";
  bad.close();
  CHECK_THROWS_AS(read_matrix(dir / "bad.mat"), LoadError);
  CHECK_THROWS_AS(read_matrix(dir / "missing.mat"), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("extractor specs parse with defaults and reject junk") {
  CHECK(make_extractor("pool2d")->info().feature_dim == 64);
  CHECK(make_extractor("pool2d:4")->info().feature_dim == 16);
  CHECK(make_extractor("pool3d")->info().feature_dim == 64);
  CHECK(make_extractor("pool3d:2")->info().feature_dim == 8);
  CHECK(make_extractor("pool2d")->info().input_rank == 2);
  CHECK(make_extractor("pool3d")->info().input_rank == 3);
  CHECK_THROWS_AS(make_extractor("wavelet"), ValidationError);
  CHECK_THROWS_AS(make_extractor("pool2d:zero"), ValidationError);
  CHECK_THROWS_AS(make_extractor("proj2d:"), ValidationError);
  CHECK_THROWS_AS(make_extractor("ts2d:/nonexistent/net.pt"), LoadError);

  auto dir = temp_dir("spec");
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(3, kPatchHeight * kPatchWidth).eval();
  write_matrix(dir / "w.mat", w);
  auto proj = make_extractor("proj2d:" + (dir / "w.mat").string());
  CHECK(proj->info().feature_dim == 3);
  CHECK(proj->info().input_rank == 2);
  fs::remove_all(dir);
}

TEST_CASE("rank-2 extraction consumes central slices") {
  // Mark only the central slice; the pooled feature must see exactly it.
  Patch p({kPatchDepth, kPatchHeight, kPatchWidth}, 0.0f);
  for (int64_t y = 0; y < kPatchHeight; ++y)
    for (int64_t x = 0; x < kPatchWidth; ++x) p.at(16, y, x) = 0.25f;
  std::vector<Patch> patches(4, p);
  VectorPatchSource source(patches);
  MeanPool2dExtractor pool(1);
  auto rows = extract_features(source, pool, 4);
  REQUIRE(rows.rows() == 4);
  for (int i = 0; i < 4; ++i) CHECK(rows(i, 0) == doctest::Approx(0.25));
}

TEST_CASE("feature extraction is independent of the streaming batch size") {
  std::vector<Patch> patches;
  for (int i = 0; i < 10; ++i) patches.push_back(indexed_patch(0.1f * (i + 1)));
  MeanPool2dExtractor pool(4);
  VectorPatchSource a(patches), b(patches);
  auto big = extract_features(a, pool, 10, 64);
  auto small = extract_features(b, pool, 10, 3);
  CHECK((big - small).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("directory sources read patch files in name order") {
  auto dir = temp_dir("dirsource");
  std::vector<Patch> patches;
  for (int i = 0; i < 3; ++i) {
    patches.push_back(indexed_patch(0.2f * (i + 1)));
    char name[32];
    std::snprintf(name, sizeof(name), "p%02d.vol", i);
    write_vol(dir / name, patches.back());
  }
  DirectoryPatchSource source(dir);
  std::vector<Patch> out;
  CHECK(source.next(out, 8) == 3);
  REQUIRE(out.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(out[i].data == patches[i].data);
  }
  CHECK(source.next(out, 1) == 0);
  source.reset();
  std::vector<Patch> again;
  CHECK(source.next(again, 2) == 2);
  CHECK_THROWS_AS(DirectoryPatchSource(dir / "missing"), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("vector sources honor want counts and reset") {
  std::vector<Patch> patches(5, indexed_patch(1.0f));
  VectorPatchSource source(patches);
  std::vector<Patch> out;
  CHECK(source.next(out, 2) == 2);
  CHECK(source.next(out, 9) == 3);
  CHECK(source.next(out, 1) == 0);
  source.reset();
  CHECK(source.next(out, 9) == 5);
}

}  // TEST_SUITE
