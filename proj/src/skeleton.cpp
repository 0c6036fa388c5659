#include "lunggan/skeleton.hpp"

#include <cmath>
#include <deque>

namespace lunggan {

Mask3D binarize(const Volume3D& volume, float threshold) {
  Mask3D mask;
  mask.shape = volume.shape;
  mask.data.resize(volume.data.size());
  for (size_t i = 0; i < volume.data.size(); ++i) {
    mask.data[i] = volume.data[i] > threshold ? 1 : 0;
  }
  return mask;
}

namespace detail {

namespace {

inline bool fg(const Mask3D& m, int64_t z, int64_t y, int64_t x) {
  if (z < 0 || y < 0 || x < 0 || z >= m.shape[0] || y >= m.shape[1] || x >= m.shape[2]) {
    return false;
  }
  return m.data[m.index(z, y, x)] != 0;
}

// Cell index inside the 3x3x3 neighborhood cube.
inline int cell(int dz, int dy, int dx) { return ((dz + 1) * 3 + (dy + 1)) * 3 + (dx + 1); }

}  // namespace

int neighbor_count26(const Mask3D& mask, int64_t z, int64_t y, int64_t x) {
  int n = 0;
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dz == 0 && dy == 0 && dx == 0) continue;
        n += fg(mask, z + dz, y + dy, x + dx);
      }
  return n;
}

bool is_simple_point(const Mask3D& mask, int64_t z, int64_t y, int64_t x) {
  bool obj[27];
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        obj[cell(dz, dy, dx)] = fg(mask, z + dz, y + dy, x + dx);
      }

  // Foreground 26-components among the 26 neighbors (center excluded).
  {
    bool seen[27] = {};
    seen[cell(0, 0, 0)] = true;
    int components = 0;
    for (int c = 0; c < 27; ++c) {
      if (seen[c] || !obj[c]) continue;
      ++components;
      if (components > 1) return false;
      std::deque<int> queue{c};
      seen[c] = true;
      while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        int cz = cur / 9 - 1, cy = (cur / 3) % 3 - 1, cx = cur % 3 - 1;
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              int nz = cz + dz, ny = cy + dy, nx = cx + dx;
              if (nz < -1 || nz > 1 || ny < -1 || ny > 1 || nx < -1 || nx > 1) continue;
              int nc = cell(nz, ny, nx);
              if (!seen[nc] && obj[nc]) {
                seen[nc] = true;
                queue.push_back(nc);
              }
            }
      }
    }
    if (components != 1) return false;
  }

  // Background 6-components within the 18-neighborhood (faces and edges),
  // counting only those touching a face neighbor of the center.
  {
    auto in18 = [](int dz, int dy, int dx) {
      int nz = std::abs(dz) + std::abs(dy) + std::abs(dx);
      return nz == 1 || nz == 2;
    };
    bool seen[27] = {};
    int components = 0;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (!in18(dz, dy, dx)) continue;
          int c = cell(dz, dy, dx);
          if (seen[c] || obj[c]) continue;
          // Flood the background 6-component within the 18-neighborhood.
          std::deque<int> queue{c};
          seen[c] = true;
          bool touches_face = false;
          while (!queue.empty()) {
            int cur = queue.front();
            queue.pop_front();
            int cz = cur / 9 - 1, cy = (cur / 3) % 3 - 1, cx = cur % 3 - 1;
            if (std::abs(cz) + std::abs(cy) + std::abs(cx) == 1) touches_face = true;
            constexpr int steps[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0},
                                         {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
            for (const auto& s : steps) {
              int nz = cz + s[0], ny = cy + s[1], nx = cx + s[2];
              if (nz < -1 || nz > 1 || ny < -1 || ny > 1 || nx < -1 || nx > 1) continue;
              if (!in18(nz, ny, nx)) continue;
              int nc = cell(nz, ny, nx);
              if (!seen[nc] && !obj[nc]) {
                seen[nc] = true;
                queue.push_back(nc);
              }
            }
          }
          if (touches_face) {
            ++components;
            if (components > 1) return false;
          }
        }
    if (components != 1) return false;
  }
  return true;
}

}  // namespace detail

Mask3D skeletonize(const Mask3D& mask) {
  Mask3D out;
  out.shape = mask.shape;
  out.data.resize(mask.data.size());
  for (size_t i = 0; i < mask.data.size(); ++i) out.data[i] = mask.data[i] ? 1 : 0;

  constexpr int dirs[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                              {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  std::vector<std::array<int64_t, 3>> candidates;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& d : dirs) {
      candidates.clear();
      for (int64_t z = 0; z < out.shape[0]; ++z)
        for (int64_t y = 0; y < out.shape[1]; ++y)
          for (int64_t x = 0; x < out.shape[2]; ++x) {
            if (!out.at(z, y, x)) continue;
            // Border voxel in the sweep direction.
            if (detail::fg(out, z + d[0], y + d[1], x + d[2])) continue;
            if (detail::neighbor_count26(out, z, y, x) <= 1) continue;  // endpoint
            if (detail::is_simple_point(out, z, y, x)) candidates.push_back({z, y, x});
          }
      // Sequential deletion with recheck keeps topology exact even though
      // candidates were gathered in parallel.
      for (const auto& p : candidates) {
        if (detail::neighbor_count26(out, p[0], p[1], p[2]) <= 1) continue;
        if (detail::is_simple_point(out, p[0], p[1], p[2])) {
          out.at(p[0], p[1], p[2]) = 0;
          changed = true;
        }
      }
    }
  }
  return out;
}

Skeleton skeletonize_patch(const Patch& patch, float threshold) {
  Skeleton s;
  s.threshold = threshold;
  s.mask = skeletonize(binarize(patch, threshold));
  return s;
}

BranchPoints count_branch_points(const Mask3D& skeleton) {
  // Voxels with >=3 neighbors cluster around a junction (arms touch each
  // other diagonally), so adjacent candidates are merged into one branch
  // point represented by the first candidate in scan order.
  Mask3D candidates(skeleton.shape);
  for (int64_t z = 0; z < skeleton.shape[0]; ++z)
    for (int64_t y = 0; y < skeleton.shape[1]; ++y)
      for (int64_t x = 0; x < skeleton.shape[2]; ++x) {
        if (!skeleton.at(z, y, x)) continue;
        if (detail::neighbor_count26(skeleton, z, y, x) >= 3) candidates.at(z, y, x) = 1;
      }

  BranchPoints result;
  std::vector<uint8_t> seen(candidates.data.size(), 0);
  std::deque<std::array<int64_t, 3>> queue;
  for (int64_t z = 0; z < candidates.shape[0]; ++z)
    for (int64_t y = 0; y < candidates.shape[1]; ++y)
      for (int64_t x = 0; x < candidates.shape[2]; ++x) {
        if (!candidates.at(z, y, x) || seen[candidates.index(z, y, x)]) continue;
        std::vector<std::array<int64_t, 3>> cluster;
        seen[candidates.index(z, y, x)] = 1;
        queue.push_back({z, y, x});
        while (!queue.empty()) {
          auto [cz, cy, cx] = queue.front();
          queue.pop_front();
          cluster.push_back({cz, cy, cx});
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                int64_t nz = cz + dz, ny = cy + dy, nx = cx + dx;
                if (nz < 0 || nz >= candidates.shape[0] || ny < 0 ||
                    ny >= candidates.shape[1] || nx < 0 || nx >= candidates.shape[2])
                  continue;
                if (!candidates.at(nz, ny, nx) || seen[candidates.index(nz, ny, nx)]) continue;
                seen[candidates.index(nz, ny, nx)] = 1;
                queue.push_back({nz, ny, nx});
              }
        }
        // Represent the junction by its most central voxel.
        std::array<double, 3> centroid{0, 0, 0};
        for (const auto& v : cluster)
          for (int a = 0; a < 3; ++a) centroid[a] += static_cast<double>(v[a]);
        for (auto& c : centroid) c /= static_cast<double>(cluster.size());
        std::sort(cluster.begin(), cluster.end());
        auto best = cluster.front();
        double best_d2 = std::numeric_limits<double>::infinity();
        for (const auto& v : cluster) {
          double d2 = 0;
          for (int a = 0; a < 3; ++a) {
            double d = static_cast<double>(v[a]) - centroid[a];
            d2 += d * d;
          }
          if (d2 < best_d2) {
            best_d2 = d2;
            best = v;
          }
        }
        result.coords.push_back(best);
      }
  std::sort(result.coords.begin(), result.coords.end());
  result.count = static_cast<int>(result.coords.size());
  return result;
}

int count_components26(const Mask3D& mask) {
  std::vector<uint8_t> seen(mask.data.size(), 0);
  int components = 0;
  std::deque<int64_t> queue;
  for (int64_t start = 0; start < mask.size(); ++start) {
    if (!mask.data[start] || seen[start]) continue;
    ++components;
    seen[start] = 1;
    queue.push_back(start);
    while (!queue.empty()) {
      int64_t cur = queue.front();
      queue.pop_front();
      int64_t z = cur / (mask.shape[1] * mask.shape[2]);
      int64_t y = (cur / mask.shape[2]) % mask.shape[1];
      int64_t x = cur % mask.shape[2];
      for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dz == 0 && dy == 0 && dx == 0) continue;
            int64_t nz = z + dz, ny = y + dy, nx = x + dx;
            if (nz < 0 || ny < 0 || nx < 0 || nz >= mask.shape[0] || ny >= mask.shape[1] ||
                nx >= mask.shape[2]) {
              continue;
            }
            int64_t ni = mask.index(nz, ny, nx);
            if (mask.data[ni] && !seen[ni]) {
              seen[ni] = 1;
              queue.push_back(ni);
            }
          }
    }
  }
  return components;
}

std::vector<Image2D> render_mip(const Mask3D& skeleton, const std::vector<double>& angles) {
  if (angles.empty()) throw ArgumentError("render_mip needs at least one angle");
  int64_t depth = skeleton.shape[0];
  int64_t diag = static_cast<int64_t>(
      std::ceil(std::hypot(static_cast<double>(skeleton.shape[1]),
                           static_cast<double>(skeleton.shape[2])))) + 1;
  double cy = (skeleton.shape[1] - 1) / 2.0;
  double cx = (skeleton.shape[2] - 1) / 2.0;
  double cc = (diag - 1) / 2.0;

  std::vector<Image2D> images;
  images.reserve(angles.size());
  for (double angle : angles) {
    Image2D img(depth, diag);
    double c = std::cos(angle), s = std::sin(angle);
    for (int64_t z = 0; z < depth; ++z)
      for (int64_t y = 0; y < skeleton.shape[1]; ++y)
        for (int64_t x = 0; x < skeleton.shape[2]; ++x) {
          if (!skeleton.at(z, y, x)) continue;
          double ry = c * (y - cy) - s * (x - cx);
          int64_t col = static_cast<int64_t>(std::llround(ry + cc));
          if (col >= 0 && col < diag) img.at(z, col) = 1.0f;
        }
    images.push_back(std::move(img));
  }
  return images;
}

}  // namespace lunggan
