#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "lunggan/common.hpp"

namespace lunggan {

// Dense float voxel grid, shape = {depth, height, width}, row-major with x
// fastest. Used both for CT volumes (HU) and for windowed patches ([-1, 1]).
struct Volume3D {
  std::array<int64_t, 3> shape{0, 0, 0};
  std::vector<float> data;

  Volume3D() = default;
  explicit Volume3D(std::array<int64_t, 3> s, float fill = 0.0f)
      : shape(s), data(static_cast<size_t>(s[0] * s[1] * s[2]), fill) {}

  int64_t size() const { return shape[0] * shape[1] * shape[2]; }
  int64_t index(int64_t z, int64_t y, int64_t x) const {
    return (z * shape[1] + y) * shape[2] + x;
  }
  float& at(int64_t z, int64_t y, int64_t x) { return data[index(z, y, x)]; }
  float at(int64_t z, int64_t y, int64_t x) const { return data[index(z, y, x)]; }
};

using Patch = Volume3D;

// Binary voxel mask with the same layout as Volume3D; values are 0 or 1.
struct Mask3D {
  std::array<int64_t, 3> shape{0, 0, 0};
  std::vector<uint8_t> data;

  Mask3D() = default;
  explicit Mask3D(std::array<int64_t, 3> s, uint8_t fill = 0)
      : shape(s), data(static_cast<size_t>(s[0] * s[1] * s[2]), fill) {}

  int64_t size() const { return shape[0] * shape[1] * shape[2]; }
  int64_t index(int64_t z, int64_t y, int64_t x) const {
    return (z * shape[1] + y) * shape[2] + x;
  }
  uint8_t& at(int64_t z, int64_t y, int64_t x) { return data[index(z, y, x)]; }
  uint8_t at(int64_t z, int64_t y, int64_t x) const { return data[index(z, y, x)]; }
  int64_t count() const;
};

// Single-channel float image, row-major.
struct Image2D {
  int64_t height = 0;
  int64_t width = 0;
  std::vector<float> data;

  Image2D() = default;
  Image2D(int64_t h, int64_t w, float fill = 0.0f)
      : height(h), width(w), data(static_cast<size_t>(h * w), fill) {}
  float& at(int64_t y, int64_t x) { return data[y * width + x]; }
  float at(int64_t y, int64_t x) const { return data[y * width + x]; }
};

struct NoduleAnnotation {
  std::string nodule_id;
  std::vector<std::array<int64_t, 3>> voxels;  // z, y, x
  std::vector<int> malignancy_scores;          // one per reading radiologist
};

// One scan: HU grid plus aligned lung/nodule masks and nodule annotations.
struct CtVolume {
  std::string scan_id;
  std::array<int64_t, 3> shape{0, 0, 0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm, z/y/x
  std::vector<float> hu;
  Mask3D lung_mask;
  Mask3D nodule_mask;
  std::vector<NoduleAnnotation> annotations;

  // Throws IntegrityError when grids/masks disagree in shape.
  void validate() const;
};

// --- MetaImage (.mhd + companion .raw, or inline LOCAL payload) ---
Volume3D read_mhd_volume(const std::filesystem::path& path,
                         std::array<double, 3>* spacing_out = nullptr);
void write_mhd_volume(const std::filesystem::path& path, const Volume3D& vol,
                      std::array<double, 3> spacing = {1.0, 1.0, 1.0});
Mask3D read_mhd_mask(const std::filesystem::path& path);
void write_mhd_mask(const std::filesystem::path& path, const Mask3D& mask,
                    std::array<double, 3> spacing = {1.0, 1.0, 1.0});

// --- Run-length encoded binary mask (text header + start/length runs) ---
Mask3D read_rle_mask(const std::filesystem::path& path);
void write_rle_mask(const std::filesystem::path& path, const Mask3D& mask);

// --- Simple binary volume container (.vol) for generated patches ---
Volume3D read_vol(const std::filesystem::path& path);
void write_vol(const std::filesystem::path& path, const Volume3D& vol);

// --- Nodule annotation CSV ---
// Columns: scan_id,nodule_id,z,y,x,scores with scores as ';'-joined ints per
// voxel row (rows of one nodule repeat the same score list).
std::map<std::string, std::vector<NoduleAnnotation>> read_annotation_csv(
    const std::filesystem::path& path);
void write_annotation_csv(
    const std::filesystem::path& path,
    const std::map<std::string, std::vector<NoduleAnnotation>>& by_scan);

// --- Split manifest: one scan id per line ---
std::vector<std::string> read_split_manifest(const std::filesystem::path& path);
void write_split_manifest(const std::filesystem::path& path,
                          const std::vector<std::string>& scan_ids);

// Loads <stem>.mhd together with its companions:
//   lung mask      <stem>.lungmask.mhd or <stem>.lungmask.rle
//   annotations    <stem>.annotations.csv, or annotations.csv in the same
//                  directory keyed by scan id (absence means no nodules)
// The nodule mask is rasterized from the annotation voxel lists.
CtVolume load_ct_volume(const std::filesystem::path& mhd_path);

}  // namespace lunggan
