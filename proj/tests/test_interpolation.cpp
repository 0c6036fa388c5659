#include <cmath>
#include <random>

#include "lunggan/interpolation.hpp"

#include "testing.hpp"

using namespace lunggan;

namespace {

Eigen::VectorXd unit(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0, 1);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = n(rng);
  return v / v.norm();
}

}  // namespace

TEST_SUITE("interpolation") {

TEST_CASE("linear interpolation hits both endpoints and the midpoint") {
  auto a = unit({1.0, 2.0, 3.0});
  auto b = unit({5.0, 6.0, 7.0});
  CHECK((lerp(a, b, 0.0) - a).norm() == doctest::Approx(0.0));
  CHECK((lerp(a, b, 1.0) - b).norm() == doctest::Approx(0.0));
  auto mid = lerp(a, b, 0.5);
  CHECK(mid[0] == doctest::Approx(3.0));
  CHECK(mid[1] == doctest::Approx(4.0));
  CHECK(mid[2] == doctest::Approx(5.0));
  CHECK_THROWS_AS(lerp(a, unit({1.0, 2.0}), 0.5), ArgumentError);
}

TEST_CASE("spherical interpolation hits endpoints exactly") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    auto a = random_unit(rng, 16);
    auto b = random_unit(rng, 16);
    CHECK((slerp(a, b, 0.0) - a).norm() < 1e-12);
    CHECK((slerp(a, b, 1.0) - b).norm() < 1e-12);
  }
}

TEST_CASE("halfway between orthogonal unit vectors is the normalized sum") {
  auto a = unit({1.0, 0.0, 0.0, 0.0});
  auto b = unit({0.0, 1.0, 0.0, 0.0});
  auto mid = slerp(a, b, 0.5);
  double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(mid[0] == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(mid[1] == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(mid[2] == doctest::Approx(0.0));
  CHECK(mid[3] == doctest::Approx(0.0));
}

TEST_CASE("great-circle paths between unit vectors stay on the sphere") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 100; ++rep) {
    auto a = random_unit(rng, 32);
    auto b = random_unit(rng, 32);
    for (int k = 0; k <= 10; ++k) {
      double t = k / 10.0;
      CHECK(slerp(a, b, t).norm() == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("interpolation angle grows linearly with t") {
  std::mt19937_64 rng(13);
  auto a = random_unit(rng, 8);
  auto b = random_unit(rng, 8);
  double omega = std::acos(std::clamp(a.dot(b), -1.0, 1.0));
  for (int k = 0; k <= 8; ++k) {
    double t = k / 8.0;
    auto p = slerp(a, b, t);
    double from_a = std::acos(std::clamp(a.dot(p) / p.norm(), -1.0, 1.0));
    CHECK(from_a == doctest::Approx(t * omega).epsilon(1e-9));
  }
}

TEST_CASE("nearly parallel endpoints fall back to straight-line blending") {
  auto a = unit({1.0, 0.0, 0.0});
  Eigen::VectorXd b = a * 2.0;  // same direction, different norm
  auto mid = slerp(a, b, 0.5);
  CHECK(mid[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(mid[1] == doctest::Approx(0.0));
}

TEST_CASE("zero-norm endpoints are rejected") {
  auto a = unit({0.0, 0.0, 0.0});
  auto b = unit({1.0, 0.0, 0.0});
  CHECK_THROWS_AS(slerp(a, b, 0.5), ArgumentError);
  CHECK_THROWS_AS(slerp(b, a, 0.5), ArgumentError);
}

TEST_CASE("paths are inclusive and evenly spaced") {
  auto a = unit({1.0, 0.0});
  auto b = unit({0.0, 1.0});
  auto linear = interpolation_path(a, b, 5, false);
  REQUIRE(linear.size() == 5);
  CHECK((linear.front() - a).norm() == doctest::Approx(0.0));
  CHECK((linear.back() - b).norm() == doctest::Approx(0.0));
  for (size_t i = 0; i < 5; ++i) {
    double t = static_cast<double>(i) / 4.0;
    CHECK((linear[i] - lerp(a, b, t)).norm() == doctest::Approx(0.0));
  }
  auto spherical = interpolation_path(a, b, 7, true);
  REQUIRE(spherical.size() == 7);
  for (size_t i = 0; i < 7; ++i) {
    double t = static_cast<double>(i) / 6.0;
    CHECK((spherical[i] - slerp(a, b, t)).norm() == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(interpolation_path(a, b, 1, false), ArgumentError);
}

}  // TEST_SUITE
