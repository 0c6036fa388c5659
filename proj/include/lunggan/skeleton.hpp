#pragma once

#include <vector>

#include "lunggan/volume.hpp"

namespace lunggan {

// Voxels strictly above the threshold become foreground.
Mask3D binarize(const Volume3D& volume, float threshold);

// Iterative topology-preserving thinning: directional border sweeps delete
// voxels that are simple points (removal changes neither foreground nor
// background connectivity, 26/6-adjacency) and are not curve endpoints.
// The result is a subset of the input with identical 26-connected component
// structure.
Mask3D skeletonize(const Mask3D& mask);

struct Skeleton {
  Mask3D mask;
  float threshold = 0.0f;
};

Skeleton skeletonize_patch(const Patch& patch, float threshold);

struct BranchPoints {
  int count = 0;
  std::vector<std::array<int64_t, 3>> coords;
};

// Skeleton junctions: voxels with three or more 26-neighbors in the
// skeleton, merged so that a 26-connected cluster of such voxels counts as
// one branch point (coords holds one representative per junction).
BranchPoints count_branch_points(const Mask3D& skeleton);

// Number of 26-connected foreground components.
int count_components26(const Mask3D& mask);

namespace detail {
// Simple-point test (26-adjacent foreground, 6-adjacent background):
// exactly one foreground 26-component in the 26-neighborhood and exactly one
// background 6-component in the 18-neighborhood touching a face neighbor.
bool is_simple_point(const Mask3D& mask, int64_t z, int64_t y, int64_t x);
int neighbor_count26(const Mask3D& mask, int64_t z, int64_t y, int64_t x);
}  // namespace detail

// Maximum-intensity projections of a rotating skeleton: for each angle the
// volume is rotated about the depth axis and projected along the width axis,
// giving one depth x diagonal image per angle.
std::vector<Image2D> render_mip(const Mask3D& skeleton, const std::vector<double>& angles);

}  // namespace lunggan
