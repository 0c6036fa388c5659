#include "lunggan/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace lunggan {

// ----- PhantomDataset -----
PhantomDataset::PhantomDataset(int64_t scan_count, uint64_t seed,
                               const PhantomOptions& options)
    : seed_(seed), options_(options) {
  if (scan_count < 1) throw ArgumentError("phantom dataset needs at least one scan");
  char name[32];
  for (int64_t i = 0; i < scan_count; ++i) {
    std::snprintf(name, sizeof(name), "phantom_%03lld", static_cast<long long>(i));
    ids_.push_back(name);
  }
}

const std::vector<std::string>& PhantomDataset::scan_ids() const { return ids_; }

const CtVolume& PhantomDataset::volume(const std::string& scan_id) {
  if (std::find(ids_.begin(), ids_.end(), scan_id) == ids_.end()) {
    throw ArgumentError("unknown phantom scan id '" + scan_id + "'");
  }
  if (!cached_ || cached_->scan_id != scan_id) {
    cached_ = make_phantom_volume(scan_id, seed_, options_);
  }
  return *cached_;
}

std::vector<Patch> PhantomDataset::sample_patches(const std::string& scan_id, int64_t count,
                                                  Rng& rng) {
  return sample_patch_batch(volume(scan_id), count, rng);
}

// ----- CtDirectoryDataset -----
CtDirectoryDataset::CtDirectoryDataset(const std::filesystem::path& dir,
                                       const std::filesystem::path& split_manifest)
    : dir_(dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw LoadError("scan directory does not exist: " + dir.string());
  }
  std::vector<std::string> found;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (entry.path().extension() == ".mhd" && name.find(".lungmask.") == std::string::npos) {
      found.push_back(entry.path().stem().string());
    }
  }
  std::sort(found.begin(), found.end());

  if (!split_manifest.empty()) {
    auto wanted = read_split_manifest(split_manifest);
    std::set<std::string> present(found.begin(), found.end());
    for (const auto& id : wanted) {
      if (!present.count(id)) {
        throw IntegrityError("split manifest names missing scan '" + id + "'");
      }
    }
    found = wanted;
  }
  all_ids_ = found;

  std::vector<std::pair<std::string, std::vector<NoduleAnnotation>>> scans;
  for (const auto& id : all_ids_) {
    scans.emplace_back(id, volume(id).annotations);
  }
  ids_ = filter_malignant_scans(scans);
  if (ids_.empty()) throw LoadError("no usable scans in " + dir.string());
}

const std::vector<std::string>& CtDirectoryDataset::scan_ids() const { return ids_; }

const CtVolume& CtDirectoryDataset::volume(const std::string& scan_id) {
  if (!cached_ || cached_->scan_id != scan_id) {
    cached_ = load_ct_volume(dir_ / (scan_id + ".mhd"));
    cached_->scan_id = scan_id;
  }
  return *cached_;
}

std::vector<Patch> CtDirectoryDataset::sample_patches(const std::string& scan_id,
                                                      int64_t count, Rng& rng) {
  if (std::find(ids_.begin(), ids_.end(), scan_id) == ids_.end()) {
    throw ArgumentError("scan '" + scan_id + "' is not part of this dataset");
  }
  return sample_patch_batch(volume(scan_id), count, rng);
}

std::vector<Patch> draw_patches(PatchDataset& dataset, int64_t count, Rng& rng) {
  const auto& ids = dataset.scan_ids();
  if (ids.empty()) throw ArgumentError("dataset has no scans");
  if (count < 1) throw ArgumentError("patch draw count must be positive");
  std::vector<Patch> out;
  out.reserve(static_cast<size_t>(count));
  int64_t per_scan =
      (count + static_cast<int64_t>(ids.size()) - 1) / static_cast<int64_t>(ids.size());
  for (const auto& id : ids) {
    if (static_cast<int64_t>(out.size()) >= count) break;
    int64_t take = std::min<int64_t>(per_scan, count - static_cast<int64_t>(out.size()));
    for (auto& p : dataset.sample_patches(id, take, rng)) out.push_back(std::move(p));
  }
  return out;
}

// ----- DatasetPatchSource -----
DatasetPatchSource::DatasetPatchSource(std::shared_ptr<PatchDataset> dataset, uint64_t seed,
                                       int64_t per_scan)
    : dataset_(std::move(dataset)), seed_(seed), per_scan_(per_scan), rng_(seed) {
  if (!dataset_ || dataset_->scan_ids().empty()) {
    throw ArgumentError("patch source needs a non-empty dataset");
  }
  if (per_scan_ < 1) throw ArgumentError("per-scan draw count must be positive");
}

int64_t DatasetPatchSource::next(std::vector<Patch>& out, int64_t want) {
  const auto& ids = dataset_->scan_ids();
  int64_t made = 0;
  while (made < want) {
    int64_t take = std::min(per_scan_, want - made);
    auto patches = dataset_->sample_patches(ids[cursor_ % ids.size()], take, rng_);
    ++cursor_;
    for (auto& p : patches) out.push_back(std::move(p));
    made += take;
  }
  return made;
}

void DatasetPatchSource::reset() {
  cursor_ = 0;
  rng_.seed(seed_);
}

}  // namespace lunggan
