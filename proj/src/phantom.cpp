#include "lunggan/phantom.hpp"

#include <cmath>
#include <random>

namespace lunggan {

namespace {

void stamp_sphere(CtVolume& vol, double cz, double cy, double cx, double radius,
                  float hu, Mask3D* record = nullptr,
                  std::vector<std::array<int64_t, 3>>* voxels = nullptr) {
  int64_t z0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(cz - radius)));
  int64_t z1 = std::min(vol.shape[0] - 1, static_cast<int64_t>(std::ceil(cz + radius)));
  int64_t y0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(cy - radius)));
  int64_t y1 = std::min(vol.shape[1] - 1, static_cast<int64_t>(std::ceil(cy + radius)));
  int64_t x0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(cx - radius)));
  int64_t x1 = std::min(vol.shape[2] - 1, static_cast<int64_t>(std::ceil(cx + radius)));
  double r2 = radius * radius;
  for (int64_t z = z0; z <= z1; ++z)
    for (int64_t y = y0; y <= y1; ++y)
      for (int64_t x = x0; x <= x1; ++x) {
        double dz = z - cz, dy = y - cy, dx = x - cx;
        if (dz * dz + dy * dy + dx * dx > r2) continue;
        int64_t idx = vol.lung_mask.index(z, y, x);
        vol.hu[idx] = hu;
        if (record && !record->data[idx]) {
          record->data[idx] = 1;
          if (voxels) voxels->push_back({z, y, x});
        }
      }
}

}  // namespace

CtVolume make_phantom_volume(const std::string& scan_id, uint64_t seed,
                             const PhantomOptions& options) {
  Rng rng(mix_seed(seed, scan_id));
  CtVolume vol;
  vol.scan_id = scan_id;
  vol.shape = options.shape;
  vol.spacing = {1.5, 0.7, 0.7};
  int64_t n = vol.shape[0] * vol.shape[1] * vol.shape[2];
  vol.hu.assign(static_cast<size_t>(n), kHuWindowLow);
  vol.lung_mask = Mask3D(vol.shape);
  vol.nodule_mask = Mask3D(vol.shape);

  double cz = vol.shape[0] / 2.0, cy = vol.shape[1] / 2.0, cx = vol.shape[2] / 2.0;
  double body_z = 0.47 * vol.shape[0], body_y = 0.46 * vol.shape[1], body_x = 0.46 * vol.shape[2];
  double lung_z = 0.38 * vol.shape[0], lung_y = 0.38 * vol.shape[1], lung_x = 0.38 * vol.shape[2];

  std::normal_distribution<float> tissue_noise(0.0f, 15.0f);
  for (int64_t z = 0; z < vol.shape[0]; ++z)
    for (int64_t y = 0; y < vol.shape[1]; ++y)
      for (int64_t x = 0; x < vol.shape[2]; ++x) {
        double bz = (z - cz) / body_z, by = (y - cy) / body_y, bx = (x - cx) / body_x;
        if (bz * bz + by * by + bx * bx > 1.0) continue;
        int64_t idx = vol.lung_mask.index(z, y, x);
        double lz = (z - cz) / lung_z, ly = (y - cy) / lung_y, lx = (x - cx) / lung_x;
        double lung_r = lz * lz + ly * ly + lx * lx;
        if (lung_r <= 1.0) {
          vol.hu[idx] = -850.0f + tissue_noise(rng);
          // Keep a safety margin so sampled patch centers sit well inside.
          if (lung_r <= 0.85) vol.lung_mask.data[idx] = 1;
        } else {
          vol.hu[idx] = 40.0f + tissue_noise(rng);
        }
      }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> dir(0.0, 1.0);
  for (int v = 0; v < options.vessel_count; ++v) {
    double pz = cz + (unit(rng) - 0.5) * lung_z;
    double py = cy + (unit(rng) - 0.5) * lung_y;
    double px = cx + (unit(rng) - 0.5) * lung_x;
    double dz = dir(rng), dy = dir(rng), dx = dir(rng);
    double norm = std::sqrt(dz * dz + dy * dy + dx * dx);
    if (norm < 1e-9) continue;
    dz /= norm; dy /= norm; dx /= norm;
    double length = 15.0 + 20.0 * unit(rng);
    double radius = 1.0 + 1.5 * unit(rng);
    for (double t = -length / 2; t <= length / 2; t += 0.5) {
      stamp_sphere(vol, pz + t * dz, py + t * dy, px + t * dx, radius, 50.0f);
    }
  }

  for (int k = 0; k < options.nodule_count; ++k) {
    double pz = cz + (unit(rng) - 0.5) * lung_z;
    double py = cy + (unit(rng) - 0.5) * lung_y;
    double px = cx + (unit(rng) - 0.5) * lung_x;
    double radius = 2.0 + 2.0 * unit(rng);
    NoduleAnnotation ann;
    ann.nodule_id = scan_id + "-n" + std::to_string(k);
    // Four readers; the median equals the requested level.
    int low = std::max(1, options.nodule_score - 1);
    ann.malignancy_scores = {options.nodule_score, options.nodule_score,
                             options.nodule_score, low};
    stamp_sphere(vol, pz, py, px, radius, 30.0f, &vol.nodule_mask, &ann.voxels);
    vol.annotations.push_back(std::move(ann));
  }

  vol.validate();
  return vol;
}

}  // namespace lunggan
