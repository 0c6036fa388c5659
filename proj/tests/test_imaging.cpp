#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "lunggan/image_io.hpp"
#include "lunggan/roc.hpp"

#include "testing.hpp"

using namespace lunggan;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  auto dir = fs::temp_directory_path() /
             (std::string("lunggan_imaging_") + tag + "_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::vector<uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

uint32_t be32(const std::vector<uint8_t>& bytes, size_t offset) {
  return (uint32_t(bytes[offset]) << 24) | (uint32_t(bytes[offset + 1]) << 16) |
         (uint32_t(bytes[offset + 2]) << 8) | uint32_t(bytes[offset + 3]);
}

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("gray conversion maps the window linearly and clamps outside it") {
  Image2D img(1, 7);
  img.data = {-2.0f, -1.0f, -0.5f, 0.0f, 0.5f, 1.0f, 2.0f};
  auto g = to_gray8(img);
  REQUIRE(g.pixels.size() == 7);
  CHECK(g.pixels[0] == 0);    // clamped below
  CHECK(g.pixels[1] == 0);
  CHECK(g.pixels[2] == 64);   // lround(0.5 * 127.5)
  CHECK(g.pixels[3] == 128);  // lround(127.5)
  CHECK(g.pixels[4] == 191);  // lround(1.5 * 127.5)
  CHECK(g.pixels[5] == 255);
  CHECK(g.pixels[6] == 255);  // clamped above

  Image2D hu(1, 3);
  hu.data = {0.0f, 50.0f, 100.0f};
  auto windowed = to_gray8(hu, 0.0f, 100.0f);
  CHECK(windowed.pixels[0] == 0);
  CHECK(windowed.pixels[1] == 128);
  CHECK(windowed.pixels[2] == 255);

  CHECK_THROWS_AS(to_gray8(img, 1.0f, 1.0f), ArgumentError);
}

TEST_CASE("grids tile row-major with uniform padding") {
  std::vector<Image2D> tiles;
  for (int i = 0; i < 5; ++i) tiles.emplace_back(4, 6, -1.0f + 0.4f * i);
  auto grid = make_grid(tiles, 3, 2);
  // 2 rows x 3 columns of 4x6 tiles with 2px padding on every seam and edge.
  CHECK(grid.height == 2 * (4 + 2) + 2);
  CHECK(grid.width == 3 * (6 + 2) + 2);
  // Padding stays black.
  CHECK(grid.pixels[0] == 0);
  CHECK(grid.pixels[1 * grid.width + 1] == 0);
  // Tile i sits at (row i/3, col i%3); probe each center.
  for (int i = 0; i < 5; ++i) {
    int64_t oy = i / 3 * 6 + 2, ox = i % 3 * 8 + 2;
    uint8_t expected = to_gray8(tiles[i]).pixels[0];
    CHECK(grid.pixels[(oy + 2) * grid.width + ox + 3] == expected);
  }
  // The empty sixth cell stays padding-valued.
  CHECK(grid.pixels[(1 * 6 + 2 + 2) * grid.width + (2 * 8 + 2 + 3)] == 0);

  CHECK_THROWS_AS(make_grid({}, 3), ArgumentError);
  CHECK_THROWS_AS(make_grid(tiles, 0), ArgumentError);
  std::vector<Image2D> ragged{Image2D(4, 6), Image2D(4, 7)};
  CHECK_THROWS_AS(make_grid(ragged, 2), ArgumentError);
}

TEST_CASE("png files carry the signature and declared dimensions") {
  auto dir = temp_dir("png");
  Image2D img(5, 9);
  for (size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = -1.0f + 2.0f * static_cast<float>(i) / (img.data.size() - 1);
  write_png(dir / "gray.png", to_gray8(img));
  auto bytes = read_bytes(dir / "gray.png");
  const uint8_t sig[8] = {0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A};
  REQUIRE(bytes.size() > 24);
  for (int i = 0; i < 8; ++i) CHECK(bytes[i] == sig[i]);
  CHECK(be32(bytes, 16) == 9);  // IHDR width
  CHECK(be32(bytes, 20) == 5);  // IHDR height

  RgbImage8 rgb(3, 4);
  rgb.set(1, 2, 10, 20, 30);
  write_png(dir / "rgb.png", rgb);
  auto rgb_bytes = read_bytes(dir / "rgb.png");
  CHECK(be32(rgb_bytes, 16) == 4);
  CHECK(be32(rgb_bytes, 20) == 3);

  CHECK_THROWS_AS(write_png(dir / "empty.png", GrayImage8()), ArgumentError);
  CHECK_THROWS_AS(write_png(dir / "no" / "such" / "dir.png", to_gray8(img)), LoadError);
  fs::remove_all(dir);
}

TEST_CASE("the value ramp runs cold to hot and saturates") {
  uint8_t r, g, b;
  value_to_color(0.0, 10.0, r, g, b);
  CHECK(r == 40);
  CHECK(g == 60);
  CHECK(b == 240);
  uint8_t r1, g1, b1;
  value_to_color(10.0, 10.0, r1, g1, b1);
  CHECK(r1 == 255);
  CHECK(g1 == 0);
  CHECK(b1 == 30);
  uint8_t r2, g2, b2;
  value_to_color(25.0, 10.0, r2, g2, b2);  // clamped at the hot end
  CHECK(r2 == r1);
  CHECK(g2 == g1);
  CHECK(b2 == b1);
  // Red rises monotonically with the value.
  uint8_t prev = 0;
  for (int k = 0; k <= 10; ++k) {
    value_to_color(k, 10.0, r, g, b);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("scatter rendering is deterministic and paints points by label") {
  std::vector<ScatterPoint> points{
      {0.0, 0.0, false, 0.0}, {1.0, 1.0, true, 5.0}, {0.5, 0.25, true, 10.0}};
  auto img = render_scatter(points, 10.0, 256);
  CHECK(img.height == 256);
  CHECK(img.width == 256);
  auto again = render_scatter(points, 10.0, 256);
  CHECK(img.pixels == again.pixels);

  // The labeled point at the top-right corner lands at a predictable pixel.
  int64_t margin = 256 / 16;
  int64_t usable = 256 - 2 * margin;
  int64_t px = margin + usable, py = margin;
  uint8_t r, g, b;
  value_to_color(5.0, 10.0, r, g, b);
  size_t at = static_cast<size_t>((py * 256 + px) * 3);
  CHECK(img.pixels[at] == r);
  CHECK(img.pixels[at + 1] == g);
  CHECK(img.pixels[at + 2] == b);

  // The unlabeled point is gray at the bottom-left corner.
  size_t at2 = static_cast<size_t>(((margin + usable) * 256 + margin) * 3);
  CHECK(img.pixels[at2] == 170);
  CHECK(img.pixels[at2 + 1] == 170);
  CHECK(img.pixels[at2 + 2] == 170);

  CHECK_THROWS_AS(render_scatter({}, 1.0), ArgumentError);
}

TEST_CASE("roc rendering draws the curve over the chance diagonal") {
  RocCurve curve;
  curve.fpr = {1.0, 0.5, 0.0};
  curve.tpr = {1.0, 1.0, 0.0};
  curve.auc = 0.75;
  auto img = render_roc(curve, 256);
  CHECK(img.height == 256);
  CHECK(img.width == 256);
  auto again = render_roc(curve, 256);
  CHECK(img.pixels == again.pixels);
  int red = 0, gray = 0;
  for (size_t i = 0; i < img.pixels.size(); i += 3) {
    if (img.pixels[i] == 200 && img.pixels[i + 1] == 40) ++red;
    if (img.pixels[i] == 180 && img.pixels[i + 1] == 180) ++gray;
  }
  CHECK(red > 100);   // the polyline
  CHECK(gray > 100);  // the diagonal
}

TEST_CASE("series rendering plots each trace in its own color") {
  std::vector<std::vector<double>> series{{0.0, 1.0, 0.5, 0.25}, {1.0, 0.0, 0.75, 0.5}};
  auto img = render_series(series, 320, 160);
  CHECK(img.height == 160);
  CHECK(img.width == 320);
  auto again = render_series(series, 320, 160);
  CHECK(img.pixels == again.pixels);
  int first = 0, second = 0;
  for (size_t i = 0; i < img.pixels.size(); i += 3) {
    if (img.pixels[i] == 200 && img.pixels[i + 1] == 40) ++first;
    if (img.pixels[i] == 40 && img.pixels[i + 1] == 80) ++second;
  }
  CHECK(first > 50);
  CHECK(second > 50);
  // An all-NaN or too-short input degrades to a blank canvas, not a crash.
  auto blank = render_series({{1.0}}, 64, 32);
  bool all_white = true;
  for (auto p : blank.pixels) all_white = all_white && p == 255;
  CHECK(all_white);
}

}  // TEST_SUITE
