#include "lunggan/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <png.h>

namespace lunggan {

namespace {

void write_png_impl(const std::filesystem::path& path, int64_t height, int64_t width,
                    int color_type, const uint8_t* pixels, size_t row_bytes) {
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw LoadError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw LoadError("png encoding failed for " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int64_t y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(pixels + static_cast<size_t>(y) * row_bytes));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace

void write_png(const std::filesystem::path& path, const GrayImage8& image) {
  if (image.height <= 0 || image.width <= 0) throw ArgumentError("cannot write an empty image");
  write_png_impl(path, image.height, image.width, PNG_COLOR_TYPE_GRAY, image.pixels.data(),
                 static_cast<size_t>(image.width));
}

void write_png(const std::filesystem::path& path, const RgbImage8& image) {
  if (image.height <= 0 || image.width <= 0) throw ArgumentError("cannot write an empty image");
  write_png_impl(path, image.height, image.width, PNG_COLOR_TYPE_RGB, image.pixels.data(),
                 static_cast<size_t>(image.width * 3));
}

GrayImage8 to_gray8(const Image2D& image, float lo, float hi) {
  if (hi <= lo) throw ArgumentError("to_gray8 needs hi > lo");
  GrayImage8 out(image.height, image.width);
  float scale = 255.0f / (hi - lo);
  for (size_t i = 0; i < image.data.size(); ++i) {
    float v = std::clamp(image.data[i], lo, hi);
    out.pixels[i] = static_cast<uint8_t>(std::lround((v - lo) * scale));
  }
  return out;
}

GrayImage8 make_grid(const std::vector<Image2D>& tiles, int columns, int pad, float lo,
                     float hi) {
  if (tiles.empty()) throw ArgumentError("cannot grid an empty tile list");
  if (columns < 1) throw ArgumentError("grid needs at least one column");
  int64_t th = tiles[0].height, tw = tiles[0].width;
  for (const auto& t : tiles) {
    if (t.height != th || t.width != tw) throw ArgumentError("grid tiles must share one shape");
  }
  int rows = static_cast<int>((tiles.size() + columns - 1) / columns);
  GrayImage8 grid(rows * (th + pad) + pad, columns * (tw + pad) + pad, 0);
  for (size_t i = 0; i < tiles.size(); ++i) {
    GrayImage8 tile = to_gray8(tiles[i], lo, hi);
    int64_t oy = static_cast<int64_t>(i) / columns * (th + pad) + pad;
    int64_t ox = static_cast<int64_t>(i) % columns * (tw + pad) + pad;
    for (int64_t y = 0; y < th; ++y)
      for (int64_t x = 0; x < tw; ++x) {
        grid.pixels[(oy + y) * grid.width + ox + x] = tile.pixels[y * tw + x];
      }
  }
  return grid;
}

void value_to_color(double value, double saturate, uint8_t& r, uint8_t& g, uint8_t& b) {
  double t = saturate > 0.0 ? std::clamp(value / saturate, 0.0, 1.0) : 0.0;
  // Cold blue through violet to hot red.
  r = static_cast<uint8_t>(std::lround(40.0 + 215.0 * t));
  g = static_cast<uint8_t>(std::lround(60.0 * (1.0 - t)));
  b = static_cast<uint8_t>(std::lround(240.0 * (1.0 - t) + 30.0 * t));
}

RgbImage8 render_scatter(const std::vector<ScatterPoint>& points, double saturate,
                         int64_t size) {
  if (points.empty()) throw ArgumentError("cannot render an empty scatter");
  RgbImage8 img(size, size, 255);
  double min_x = points[0].x, max_x = points[0].x, min_y = points[0].y, max_y = points[0].y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double span_x = max_x > min_x ? max_x - min_x : 1.0;
  double span_y = max_y > min_y ? max_y - min_y : 1.0;
  int64_t margin = size / 16;
  double usable = static_cast<double>(size - 2 * margin);

  auto plot = [&](const ScatterPoint& p) {
    int64_t px = margin + static_cast<int64_t>(std::lround((p.x - min_x) / span_x * usable));
    int64_t py = margin + static_cast<int64_t>(std::lround((max_y - p.y) / span_y * usable));
    uint8_t r = 170, g = 170, b = 170;
    if (p.labeled) value_to_color(p.value, saturate, r, g, b);
    int radius = p.labeled ? 2 : 1;
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        if (dy * dy + dx * dx > radius * radius) continue;
        int64_t y = py + dy, x = px + dx;
        if (y >= 0 && y < size && x >= 0 && x < size) img.set(y, x, r, g, b);
      }
  };
  // Draw unlabeled points first so labeled ones stay visible on top.
  for (const auto& p : points) {
    if (!p.labeled) plot(p);
  }
  for (const auto& p : points) {
    if (p.labeled) plot(p);
  }
  return img;
}

namespace {

void draw_line(RgbImage8& img, double x0, double y0, double x1, double y1, uint8_t r,
               uint8_t g, uint8_t b) {
  int steps = static_cast<int>(std::ceil(std::max(std::fabs(x1 - x0), std::fabs(y1 - y0)))) + 1;
  for (int i = 0; i <= steps; ++i) {
    double t = static_cast<double>(i) / steps;
    int64_t x = static_cast<int64_t>(std::lround(x0 + t * (x1 - x0)));
    int64_t y = static_cast<int64_t>(std::lround(y0 + t * (y1 - y0)));
    if (x >= 0 && x < img.width && y >= 0 && y < img.height) img.set(y, x, r, g, b);
  }
}

}  // namespace

RgbImage8 render_roc(const RocCurve& curve, int64_t size) {
  RgbImage8 img(size, size, 255);
  int64_t margin = size / 16;
  double usable = static_cast<double>(size - 2 * margin);
  auto px = [&](double fpr) { return margin + fpr * usable; };
  auto py = [&](double tpr) { return margin + (1.0 - tpr) * usable; };
  // Axes box.
  draw_line(img, px(0), py(0), px(1), py(0), 0, 0, 0);
  draw_line(img, px(0), py(0), px(0), py(1), 0, 0, 0);
  draw_line(img, px(1), py(0), px(1), py(1), 0, 0, 0);
  draw_line(img, px(0), py(1), px(1), py(1), 0, 0, 0);
  // Chance diagonal.
  draw_line(img, px(0), py(0), px(1), py(1), 180, 180, 180);
  for (size_t i = 0; i + 1 < curve.fpr.size(); ++i) {
    draw_line(img, px(curve.fpr[i]), py(curve.tpr[i]), px(curve.fpr[i + 1]),
              py(curve.tpr[i + 1]), 200, 40, 40);
  }
  return img;
}

RgbImage8 render_series(const std::vector<std::vector<double>>& series, int64_t width,
                        int64_t height) {
  RgbImage8 img(height, width, 255);
  double lo = 0.0, hi = 1.0;
  bool have = false;
  size_t longest = 0;
  for (const auto& s : series) {
    longest = std::max(longest, s.size());
    for (double v : s) {
      if (!std::isfinite(v)) continue;
      if (!have) {
        lo = hi = v;
        have = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (!have || longest < 2) return img;
  if (hi <= lo) hi = lo + 1.0;
  int64_t margin = height / 12;
  double ux = static_cast<double>(width - 2 * margin);
  double uy = static_cast<double>(height - 2 * margin);
  const uint8_t palette[4][3] = {{200, 40, 40}, {40, 80, 200}, {30, 140, 60}, {150, 90, 20}};
  for (size_t s = 0; s < series.size(); ++s) {
    const auto& v = series[s];
    const uint8_t* color = palette[s % 4];
    for (size_t i = 0; i + 1 < v.size(); ++i) {
      if (!std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
      double x0 = margin + ux * static_cast<double>(i) / (longest - 1);
      double x1 = margin + ux * static_cast<double>(i + 1) / (longest - 1);
      double y0 = margin + uy * (1.0 - (v[i] - lo) / (hi - lo));
      double y1 = margin + uy * (1.0 - (v[i + 1] - lo) / (hi - lo));
      draw_line(img, x0, y0, x1, y1, color[0], color[1], color[2]);
    }
  }
  return img;
}

}  // namespace lunggan
