#include "lunggan/patch_sampler.hpp"

#include <algorithm>

namespace lunggan {

float window_and_scale(float hu) {
  float clamped = std::clamp(hu, kHuWindowLow, kHuWindowHigh);
  float mid = 0.5f * (kHuWindowLow + kHuWindowHigh);
  float half = 0.5f * (kHuWindowHigh - kHuWindowLow);
  return (clamped - mid) / half;
}

double median_score(std::vector<int> scores) {
  if (scores.empty()) throw ArgumentError("median of an empty score list is undefined");
  std::sort(scores.begin(), scores.end());
  size_t n = scores.size();
  if (n % 2 == 1) return scores[n / 2];
  return 0.5 * (scores[n / 2 - 1] + scores[n / 2]);
}

bool scan_has_malignant_nodule(const std::vector<NoduleAnnotation>& annotations) {
  for (const auto& nodule : annotations) {
    if (nodule.malignancy_scores.empty()) continue;
    if (median_score(nodule.malignancy_scores) >= kMalignancyExclusionThreshold) return true;
  }
  return false;
}

std::vector<std::string> filter_malignant_scans(
    const std::vector<std::pair<std::string, std::vector<NoduleAnnotation>>>& scans) {
  std::vector<std::string> kept;
  for (const auto& [scan_id, annotations] : scans) {
    if (!scan_has_malignant_nodule(annotations)) kept.push_back(scan_id);
  }
  return kept;
}

PatchSampler::PatchSampler(const CtVolume& volume) : volume_(&volume) {
  volume.validate();
  int64_t n = volume.lung_mask.size();
  for (int64_t i = 0; i < n; ++i) {
    if (volume.lung_mask.data[i]) centers_.push_back(i);
  }
}

std::vector<Patch> PatchSampler::sample(int64_t count, Rng& rng) const {
  if (count <= 0) throw ArgumentError("patch count must be positive");
  if (centers_.empty()) {
    throw SamplingError("scan " + volume_->scan_id + " has no lung-mask voxels to sample from");
  }
  const auto& shape = volume_->shape;
  const int64_t hz = kPatchDepth / 2, hy = kPatchHeight / 2, hx = kPatchWidth / 2;
  std::uniform_int_distribution<size_t> pick(0, centers_.size() - 1);

  std::vector<Patch> patches;
  patches.reserve(static_cast<size_t>(count));
  int64_t budget = 100 * count;
  int64_t draws = 0;
  while (static_cast<int64_t>(patches.size()) < count && draws < budget) {
    ++draws;
    int64_t flat = centers_[pick(rng)];
    int64_t cz = flat / (shape[1] * shape[2]);
    int64_t cy = (flat / shape[2]) % shape[1];
    int64_t cx = flat % shape[2];
    int64_t z0 = cz - hz, y0 = cy - hy, x0 = cx - hx;
    if (z0 < 0 || y0 < 0 || x0 < 0 || z0 + kPatchDepth > shape[0] ||
        y0 + kPatchHeight > shape[1] || x0 + kPatchWidth > shape[2]) {
      continue;
    }
    bool touches_nodule = false;
    for (int64_t z = z0; z < z0 + kPatchDepth && !touches_nodule; ++z)
      for (int64_t y = y0; y < y0 + kPatchHeight && !touches_nodule; ++y) {
        const uint8_t* row = &volume_->nodule_mask.data[volume_->nodule_mask.index(z, y, x0)];
        for (int64_t x = 0; x < kPatchWidth; ++x) {
          if (row[x]) {
            touches_nodule = true;
            break;
          }
        }
      }
    if (touches_nodule) continue;

    Patch patch({kPatchDepth, kPatchHeight, kPatchWidth});
    float* dst = patch.data.data();
    for (int64_t z = z0; z < z0 + kPatchDepth; ++z)
      for (int64_t y = y0; y < y0 + kPatchHeight; ++y) {
        const float* src = &volume_->hu[volume_->lung_mask.index(z, y, x0)];
        for (int64_t x = 0; x < kPatchWidth; ++x) *dst++ = window_and_scale(src[x]);
      }
    patches.push_back(std::move(patch));
  }
  if (static_cast<int64_t>(patches.size()) < count) {
    throw PartialYieldError(static_cast<int64_t>(patches.size()), count);
  }
  return patches;
}

std::vector<Patch> sample_patch_batch(const CtVolume& volume, int64_t count, Rng& rng) {
  return PatchSampler(volume).sample(count, rng);
}

std::vector<EpochEntry> epoch_plan(std::vector<std::string> scan_ids, Rng& rng,
                                   int minibatches_per_scan) {
  if (minibatches_per_scan <= 0) throw ArgumentError("minibatches_per_scan must be positive");
  std::shuffle(scan_ids.begin(), scan_ids.end(), rng);
  std::vector<EpochEntry> plan;
  plan.reserve(scan_ids.size() * static_cast<size_t>(minibatches_per_scan));
  for (const auto& id : scan_ids) {
    for (int m = 0; m < minibatches_per_scan; ++m) plan.push_back({id, m});
  }
  return plan;
}

}  // namespace lunggan
