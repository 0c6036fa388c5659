#pragma once

#include <filesystem>
#include <vector>

#include "lunggan/volume.hpp"

namespace lunggan {

struct ObserverExport {
  std::filesystem::path out_dir;
  std::vector<std::string> stimulus_files;      // anonymous PNG names, sorted
  std::filesystem::path key_file;               // sealed filename->label map
  std::vector<std::filesystem::path> order_files;  // three randomized reading orders
  std::filesystem::path manifest_file;
};

// Writes per_class real and per_class fake central slices as 8-bit grayscale
// PNGs under randomized anonymous names, a sealed key CSV mapping each file
// to its label and source index, and three independently shuffled reading
// orders. Deterministic in the seed.
ObserverExport export_observer_study(const std::vector<Patch>& real,
                                     const std::vector<Patch>& fake, uint64_t seed,
                                     const std::filesystem::path& out_dir,
                                     int per_class = 100);

}  // namespace lunggan
