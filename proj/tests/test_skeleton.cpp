#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "lunggan/skeleton.hpp"

#include "testing.hpp"

using namespace lunggan;

namespace {

Mask3D random_mask(Rng& rng, std::array<int64_t, 3> shape, double p) {
  Mask3D m(shape);
  std::bernoulli_distribution coin(p);
  for (auto& v : m.data) v = coin(rng) ? 1 : 0;
  return m;
}

bool subset_of(const Mask3D& inner, const Mask3D& outer) {
  for (size_t i = 0; i < inner.data.size(); ++i)
    if (inner.data[i] && !outer.data[i]) return false;
  return true;
}

int64_t popcount(const Mask3D& m) {
  int64_t n = 0;
  for (auto v : m.data) n += v != 0;
  return n;
}

// Applies an axis permutation then per-axis reflections to a mask.
Mask3D transform(const Mask3D& m, std::array<int, 3> perm, std::array<bool, 3> flip) {
  std::array<int64_t, 3> shape{m.shape[perm[0]], m.shape[perm[1]], m.shape[perm[2]]};
  Mask3D out(shape);
  for (int64_t z = 0; z < m.shape[0]; ++z)
    for (int64_t y = 0; y < m.shape[1]; ++y)
      for (int64_t x = 0; x < m.shape[2]; ++x) {
        std::array<int64_t, 3> src{z, y, x};
        std::array<int64_t, 3> dst;
        for (int a = 0; a < 3; ++a) {
          int64_t c = src[perm[a]];
          dst[a] = flip[a] ? shape[a] - 1 - c : c;
        }
        out.at(dst[0], dst[1], dst[2]) = m.at(z, y, x);
      }
  return out;
}

Mask3D tube_mask() {
  Mask3D m({32, 64, 64});
  const int64_t zc = 16, xc = 32;
  for (int64_t y = 8; y < 56; ++y)
    for (int64_t z = zc - 4; z <= zc + 4; ++z)
      for (int64_t x = xc - 4; x <= xc + 4; ++x)
        if ((z - zc) * (z - zc) + (x - xc) * (x - xc) <= 9) m.at(z, y, x) = 1;
  return m;
}

}  // namespace

TEST_SUITE("skeleton") {

TEST_CASE("binarize keeps strictly-above voxels only") {
  Volume3D v({1, 1, 4});
  v.data = {-0.2f, 0.0f, 0.2f, 0.5f};
  auto m = binarize(v, 0.2f);
  CHECK(m.shape == v.shape);
  CHECK(m.data == std::vector<uint8_t>{0, 0, 0, 1});
  CHECK(binarize(v, -1.0f).count() == 4);
  CHECK(binarize(v, 0.5f).count() == 0);
}

TEST_CASE("empty mask skeletonizes to an empty mask") {
  Mask3D m({6, 6, 6});
  auto s = skeletonize(m);
  CHECK(s.shape == m.shape);
  CHECK(popcount(s) == 0);
}

TEST_CASE("a straight line has no branch points and is already thin") {
  Mask3D line({9, 9, 9});
  for (int64_t x = 1; x <= 7; ++x) line.at(4, 4, x) = 1;
  CHECK(count_branch_points(line).count == 0);
  auto s = skeletonize(line);
  CHECK(s.data == line.data);
  CHECK(count_components26(s) == 1);
}

TEST_CASE("a plus shape has exactly one branch point at the crossing") {
  Mask3D plus({9, 9, 9});
  for (int64_t x = 1; x <= 7; ++x) plus.at(4, 4, x) = 1;
  for (int64_t y = 1; y <= 7; ++y) plus.at(4, y, 4) = 1;
  auto bp = count_branch_points(plus);
  CHECK(bp.count == 1);
  REQUIRE(bp.coords.size() == 1);
  CHECK(bp.coords[0] == std::array<int64_t, 3>{4, 4, 4});
}

TEST_CASE("a 3-d asterisk has exactly one branch point") {
  Mask3D star({9, 9, 9});
  for (int64_t t = 1; t <= 7; ++t) {
    star.at(4, 4, t) = 1;
    star.at(4, t, 4) = 1;
    star.at(t, 4, 4) = 1;
  }
  auto bp = count_branch_points(star);
  CHECK(bp.count == 1);
  REQUIRE(bp.coords.size() == 1);
  CHECK(bp.coords[0] == std::array<int64_t, 3>{4, 4, 4});
}

TEST_CASE("a radius-3 tube thins to one connected axial curve") {
  auto mask = tube_mask();
  auto s = skeletonize(mask);
  CHECK(subset_of(s, mask));
  CHECK(count_components26(s) == 1);
  CHECK(count_branch_points(s).count == 0);

  // Every skeleton voxel lies on the tube axis and the curve loses at most
  // one radius per end.
  int64_t n = 0, endpoints = 0;
  for (int64_t z = 0; z < s.shape[0]; ++z)
    for (int64_t y = 0; y < s.shape[1]; ++y)
      for (int64_t x = 0; x < s.shape[2]; ++x) {
        if (!s.at(z, y, x)) continue;
        ++n;
        CHECK(z == 16);
        CHECK(x == 32);
        int nb = detail::neighbor_count26(s, z, y, x);
        CHECK(nb <= 2);
        if (nb == 1) ++endpoints;
      }
  CHECK(endpoints == 2);
  CHECK(n >= 48 - 2 * 3);
  CHECK(n <= 48);

  auto again = skeletonize(s);
  CHECK(again.data == s.data);
}

TEST_CASE("skeletons stay inside the mask and preserve component counts") {
  Rng rng(mix_seed(11, "skeleton-subset"));
  for (int rep = 0; rep < 120; ++rep) {
    double p = rep % 3 == 0 ? 0.1 : (rep % 3 == 1 ? 0.35 : 0.7);
    auto mask = random_mask(rng, {10, 11, 12}, p);
    auto s = skeletonize(mask);
    CHECK(subset_of(s, mask));
    CHECK(count_components26(s) == count_components26(mask));
  }
}

TEST_CASE("branch counts are invariant under axis permutations and reflections") {
  Rng rng(mix_seed(12, "skeleton-symmetry"));
  const std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int rep = 0; rep < 12; ++rep) {
    auto s = skeletonize(random_mask(rng, {9, 10, 11}, 0.3));
    int base = count_branch_points(s).count;
    for (const auto& perm : perms)
      for (auto flip : {std::array<bool, 3>{false, false, false},
                        std::array<bool, 3>{true, false, true},
                        std::array<bool, 3>{true, true, true}})
        CHECK(count_branch_points(transform(s, perm, flip)).count == base);
  }
}

TEST_CASE("26-component counting matches hand-built configurations") {
  Mask3D m({4, 4, 4});
  CHECK(count_components26(m) == 0);
  m.at(0, 0, 0) = 1;
  CHECK(count_components26(m) == 1);
  m.at(1, 1, 1) = 1;  // corner contact is 26-adjacent
  CHECK(count_components26(m) == 1);
  m.at(3, 3, 3) = 1;  // isolated
  CHECK(count_components26(m) == 2);
  m.at(2, 2, 2) = 1;  // bridges the gap
  CHECK(count_components26(m) == 1);
}

TEST_CASE("simple-point test matches known neighborhoods") {
  // Endpoint of a line: removable without topology change.
  Mask3D line({5, 5, 7});
  for (int64_t x = 1; x <= 5; ++x) line.at(2, 2, x) = 1;
  CHECK(detail::is_simple_point(line, 2, 2, 5));
  // Interior of the line: removal would split it.
  CHECK_FALSE(detail::is_simple_point(line, 2, 2, 3));
  // Isolated voxel: removal deletes a component.
  Mask3D lone({5, 5, 5});
  lone.at(2, 2, 2) = 1;
  CHECK_FALSE(detail::is_simple_point(lone, 2, 2, 2));
  // Corner of a 2x2 square: removal leaves a connected L.
  Mask3D square({3, 4, 4});
  square.at(1, 1, 1) = square.at(1, 1, 2) = square.at(1, 2, 1) = square.at(1, 2, 2) = 1;
  CHECK(detail::is_simple_point(square, 1, 1, 1));
  // Center of a solid cube: no adjacent background component.
  Mask3D cube({5, 5, 5});
  for (int64_t z = 1; z <= 3; ++z)
    for (int64_t y = 1; y <= 3; ++y)
      for (int64_t x = 1; x <= 3; ++x) cube.at(z, y, x) = 1;
  CHECK_FALSE(detail::is_simple_point(cube, 2, 2, 2));
}

TEST_CASE("neighbor counting covers the full 26-neighborhood") {
  Mask3D m({3, 3, 3}, 1);
  CHECK(detail::neighbor_count26(m, 1, 1, 1) == 26);
  CHECK(detail::neighbor_count26(m, 0, 0, 0) == 7);
  Mask3D plus({9, 9, 9});
  for (int64_t x = 1; x <= 7; ++x) plus.at(4, 4, x) = 1;
  for (int64_t y = 1; y <= 7; ++y) plus.at(4, y, 4) = 1;
  CHECK(detail::neighbor_count26(plus, 4, 4, 4) == 4);
}

TEST_CASE("rotating maximum projections place voxels where the geometry says") {
  // Shape (5, 7, 9): diagonal = ceil(hypot(7, 9)) + 1 = 13, center column 6.
  Mask3D one({5, 7, 9});
  one.at(2, 3, 4) = 1;
  std::vector<double> angles;
  for (int k = 0; k < 10; ++k) angles.push_back(2.0 * M_PI * k / 10.0);
  auto mips = render_mip(one, angles);
  REQUIRE(mips.size() == 10);
  for (const auto& img : mips) {
    CHECK(img.height == 5);
    CHECK(img.width == 13);
    double sum = 0;
    for (auto v : img.data) sum += v;
    CHECK(sum == doctest::Approx(1.0));  // the center voxel projects to one pixel
    CHECK(img.at(2, 6) == doctest::Approx(1.0f));
  }

  // A line along the projection axis collapses to a point at angle 0 and
  // spreads to a full-length segment a quarter turn later.
  Mask3D line({5, 7, 9});
  for (int64_t x = 0; x < 9; ++x) line.at(2, 3, x) = 1;
  auto views = render_mip(line, {0.0, M_PI / 2.0});
  double head_on = 0, sideways = 0;
  for (auto v : views[0].data) head_on += v;
  for (auto v : views[1].data) sideways += v;
  CHECK(head_on == doctest::Approx(1.0));
  CHECK(views[0].at(2, 6) == doctest::Approx(1.0f));
  CHECK(sideways == doctest::Approx(9.0));

  // A line along depth is a vertical segment at every angle.
  Mask3D pillar({5, 7, 9});
  for (int64_t z = 0; z < 5; ++z) pillar.at(z, 3, 4) = 1;
  for (const auto& img : render_mip(pillar, angles)) {
    for (int64_t z = 0; z < 5; ++z) {
      double row = 0;
      for (int64_t c = 0; c < img.width; ++c) row += img.at(z, c);
      CHECK(row == doctest::Approx(1.0));
    }
  }

  CHECK_THROWS_AS(render_mip(one, {}), ArgumentError);
}

TEST_CASE("patch skeletonization binarizes then thins") {
  auto mask = tube_mask();
  Patch p({32, 64, 64}, -1.0f);
  for (size_t i = 0; i < mask.data.size(); ++i)
    if (mask.data[i]) p.data[i] = 0.8f;
  auto sk = skeletonize_patch(p, 0.5f);
  CHECK(sk.threshold == 0.5f);
  CHECK(sk.mask.data == skeletonize(mask).data);
}

}  // TEST_SUITE
