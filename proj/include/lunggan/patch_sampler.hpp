#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lunggan/volume.hpp"

namespace lunggan {

// Clamps to the HU window [-1000, 400] and maps it linearly onto [-1, 1].
float window_and_scale(float hu);

// Median of integer reader scores; throws ArgumentError when empty.
double median_score(std::vector<int> scores);

// True when any nodule of the scan has a median malignancy score at or above
// the exclusion threshold.
bool scan_has_malignant_nodule(const std::vector<NoduleAnnotation>& annotations);

// Keeps the scan ids whose annotation lists carry no malignant nodule,
// preserving input order.
std::vector<std::string> filter_malignant_scans(
    const std::vector<std::pair<std::string, std::vector<NoduleAnnotation>>>& scans);

// Rejection sampler over one scan. Candidate centers are lung-mask voxels;
// a draw is accepted when the whole patch extent lies inside the volume and
// intersects no nodule voxel. Accepted patches are windowed onto [-1, 1].
class PatchSampler {
 public:
  explicit PatchSampler(const CtVolume& volume);

  // Draws `count` patches; retry budget is 100 * count rejections.
  std::vector<Patch> sample(int64_t count, Rng& rng) const;

  int64_t candidate_center_count() const { return static_cast<int64_t>(centers_.size()); }

 private:
  const CtVolume* volume_;
  std::vector<int64_t> centers_;  // flat indices of lung-mask voxels
};

std::vector<Patch> sample_patch_batch(const CtVolume& volume, int64_t count, Rng& rng);

// One training step's provenance: which scan and which of its minibatches.
struct EpochEntry {
  std::string scan_id;
  int minibatch_index;
};

// Shuffles the scans and schedules `minibatches_per_scan` consecutive
// minibatches for each, so one epoch visits every scan exactly once.
std::vector<EpochEntry> epoch_plan(std::vector<std::string> scan_ids, Rng& rng,
                                   int minibatches_per_scan = kMinibatchesPerScan);

}  // namespace lunggan
