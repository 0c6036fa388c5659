#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lunggan/features.hpp"
#include "lunggan/patch_sampler.hpp"
#include "lunggan/phantom.hpp"
#include "lunggan/volume.hpp"

namespace lunggan {

// A training corpus: named scans from which real patches can be drawn.
class PatchDataset {
 public:
  virtual ~PatchDataset() = default;
  virtual const std::vector<std::string>& scan_ids() const = 0;
  virtual std::vector<Patch> sample_patches(const std::string& scan_id, int64_t count,
                                            Rng& rng) = 0;
};

// Synthetic corpus of procedurally generated chest phantoms; volumes are
// built on demand and the most recent one is kept, which matches the
// scan-at-a-time access pattern of an epoch plan.
class PhantomDataset : public PatchDataset {
 public:
  PhantomDataset(int64_t scan_count, uint64_t seed, const PhantomOptions& options = {});
  const std::vector<std::string>& scan_ids() const override;
  std::vector<Patch> sample_patches(const std::string& scan_id, int64_t count,
                                    Rng& rng) override;

  const CtVolume& volume(const std::string& scan_id);

 private:
  std::vector<std::string> ids_;
  uint64_t seed_;
  PhantomOptions options_;
  std::optional<CtVolume> cached_;
};

// Corpus of .mhd scans in a directory, each with lung-mask/annotation
// companions. Scans whose median nodule malignancy reaches the exclusion
// threshold are dropped; an optional split manifest restricts and orders the
// scan list. The most recently used volume stays cached.
class CtDirectoryDataset : public PatchDataset {
 public:
  explicit CtDirectoryDataset(const std::filesystem::path& dir,
                              const std::filesystem::path& split_manifest = {});
  const std::vector<std::string>& scan_ids() const override;
  std::vector<Patch> sample_patches(const std::string& scan_id, int64_t count,
                                    Rng& rng) override;

  // Ids present before the malignancy filter, for reporting.
  const std::vector<std::string>& unfiltered_scan_ids() const { return all_ids_; }

 private:
  const CtVolume& volume(const std::string& scan_id);

  std::filesystem::path dir_;
  std::vector<std::string> all_ids_;
  std::vector<std::string> ids_;
  std::optional<CtVolume> cached_;
};

// Draws `count` patches spread evenly over the dataset's scans, visiting
// each scan once (volumes load once per call).
std::vector<Patch> draw_patches(PatchDataset& dataset, int64_t count, Rng& rng);

// Adapts a dataset to the streaming patch-source interface: an endless
// round-robin over scans drawing `per_scan` patches at a time. reset()
// restores the initial scan cursor and reseeds the draw stream.
class DatasetPatchSource : public PatchSource {
 public:
  DatasetPatchSource(std::shared_ptr<PatchDataset> dataset, uint64_t seed,
                     int64_t per_scan = 16);
  int64_t next(std::vector<Patch>& out, int64_t want) override;
  void reset() override;

 private:
  std::shared_ptr<PatchDataset> dataset_;
  uint64_t seed_;
  int64_t per_scan_;
  size_t cursor_ = 0;
  Rng rng_;
};

}  // namespace lunggan
