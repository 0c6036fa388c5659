#pragma once

#include <cstdint>
#include <string>

#include "lunggan/volume.hpp"

namespace lunggan {

struct PhantomOptions {
  std::array<int64_t, 3> shape{64, 96, 96};
  int vessel_count = 6;
  int nodule_count = 0;
  // When a nodule is placed, half the readers score it at this level.
  int nodule_score = 2;
};

// Builds a synthetic chest-like scan: air background, soft-tissue body
// ellipsoid, low-density lung ellipsoid with bright vessel tubes, plus
// optional nodules with annotations. Deterministic in (scan_id, seed).
CtVolume make_phantom_volume(const std::string& scan_id, uint64_t seed,
                             const PhantomOptions& options = {});

}  // namespace lunggan
