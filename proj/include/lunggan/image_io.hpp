#pragma once

#include <filesystem>
#include <vector>

#include "lunggan/roc.hpp"
#include "lunggan/volume.hpp"

namespace lunggan {

struct GrayImage8 {
  int64_t height = 0;
  int64_t width = 0;
  std::vector<uint8_t> pixels;

  GrayImage8() = default;
  GrayImage8(int64_t h, int64_t w, uint8_t fill = 0)
      : height(h), width(w), pixels(static_cast<size_t>(h * w), fill) {}
};

struct RgbImage8 {
  int64_t height = 0;
  int64_t width = 0;
  std::vector<uint8_t> pixels;  // interleaved r, g, b

  RgbImage8() = default;
  RgbImage8(int64_t h, int64_t w, uint8_t fill = 0)
      : height(h), width(w), pixels(static_cast<size_t>(h * w * 3), fill) {}
  void set(int64_t y, int64_t x, uint8_t r, uint8_t g, uint8_t b) {
    size_t i = static_cast<size_t>((y * width + x) * 3);
    pixels[i] = r;
    pixels[i + 1] = g;
    pixels[i + 2] = b;
  }
};

void write_png(const std::filesystem::path& path, const GrayImage8& image);
void write_png(const std::filesystem::path& path, const RgbImage8& image);

// Maps [lo, hi] linearly onto [0, 255] with clamping.
GrayImage8 to_gray8(const Image2D& image, float lo = -1.0f, float hi = 1.0f);

// Tiles images left-to-right, top-to-bottom on a uniform grid with padding.
GrayImage8 make_grid(const std::vector<Image2D>& tiles, int columns, int pad = 2,
                     float lo = -1.0f, float hi = 1.0f);

// Blue-to-red ramp; values at or above `saturate` all map to the hottest color.
void value_to_color(double value, double saturate, uint8_t& r, uint8_t& g, uint8_t& b);

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  bool labeled = false;
  double value = 0.0;
};

// Scatter plot of embedding points; unlabeled points are gray, labeled points
// are colored by value with the ramp saturating at `saturate`.
RgbImage8 render_scatter(const std::vector<ScatterPoint>& points, double saturate,
                         int64_t size = 512);

// ROC polyline with the chance diagonal.
RgbImage8 render_roc(const RocCurve& curve, int64_t size = 512);

// Loss traces (iteration, value) as polylines on a shared canvas.
RgbImage8 render_series(const std::vector<std::vector<double>>& series, int64_t width = 640,
                        int64_t height = 320);

}  // namespace lunggan
