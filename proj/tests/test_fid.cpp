#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "lunggan/features.hpp"
#include "lunggan/fid.hpp"

#include "testing.hpp"

using namespace lunggan;

namespace {

FeatureStats stats_of(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) {
  FeatureStats s;
  s.mu = mu;
  s.sigma = sigma;
  s.n = 2;
  return s;
}

Eigen::MatrixXd random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = n(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ();
}

FeatureStats random_stats(int d, std::mt19937_64& rng, double spread) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = n(rng);
  FeatureStats s;
  s.sigma = a * a.transpose() / d + 0.05 * Eigen::MatrixXd::Identity(d, d);
  s.mu = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < d; ++i) s.mu(i) = spread * n(rng);
  s.n = 2 * d;
  return s;
}

Patch constant_patch(float value) {
  Patch p({kPatchDepth, kPatchHeight, kPatchWidth}, value);
  return p;
}

}  // namespace

TEST_SUITE("fid") {

TEST_CASE("gaussian_stats matches hand arithmetic") {
  Eigen::MatrixXd rows(2, 2);
  rows << 0, 0, 2, 2;
  auto s = gaussian_stats(rows);
  CHECK(s.n == 2);
  CHECK(s.mu(0) == doctest::Approx(1.0));
  CHECK(s.mu(1) == doctest::Approx(1.0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(s.sigma(i, j) == doctest::Approx(2.0));
}

TEST_CASE("identical rows give zero covariance") {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Ones(5, 3) * 4.2;
  auto s = gaussian_stats(rows);
  CHECK(s.sigma.cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gaussian_stats equals a two-pass loop oracle") {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> n(0.0, 2.0);
  const int N = 100, d = 5;
  Eigen::MatrixXd rows(N, d);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < d; ++j) rows(i, j) = n(rng);

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < N; ++i) mu += rows.row(i).transpose();
  mu /= N;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd c = rows.row(i).transpose() - mu;
    sigma += c * c.transpose();
  }
  sigma /= (N - 1);

  auto s = gaussian_stats(rows);
  CHECK((s.mu - mu).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.sigma - sigma).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.sigma - s.sigma.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("gaussian_stats needs at least two rows") {
  CHECK_THROWS_AS(gaussian_stats(Eigen::MatrixXd::Zero(1, 4)), ArgumentError);
}

TEST_CASE("distance of a Gaussian to itself is zero") {
  std::mt19937_64 rng(9);
  auto a = random_stats(8, rng, 1.0);
  CHECK(frechet_distance(a, a) < 1e-8);
}

TEST_CASE("one-dimensional closed form") {
  // means 0 -> 1, variances 1 -> 4: (0-1)^2 + (1-2)^2 = 2
  auto a = stats_of(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  auto b = stats_of(Eigen::VectorXd::Ones(1), 4.0 * Eigen::MatrixXd::Identity(1, 1));
  CHECK(frechet_distance(a, b) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("diagonal three-dimensional closed form") {
  // equal means, std devs (1,2,3) vs (2,3,4): sum of squared differences = 3
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(3);
  Eigen::MatrixXd sa = Eigen::MatrixXd::Zero(3, 3), sb = Eigen::MatrixXd::Zero(3, 3);
  sa.diagonal() << 1.0, 4.0, 9.0;
  sb.diagonal() << 4.0, 9.0, 16.0;
  CHECK(frechet_distance(stats_of(mu, sa), stats_of(mu, sb)) ==
        doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("commuting covariances reduce to matched eigenvalue differences") {
  std::mt19937_64 rng(31);
  auto q = random_orthogonal(6, rng);
  Eigen::VectorXd la(6), lb(6);
  la << 0.5, 1.0, 2.0, 3.0, 4.0, 5.0;
  lb << 1.0, 1.5, 2.5, 3.0, 6.0, 9.0;
  // Same eigenbasis means the trace term reduces per matched eigenvalue.
  auto a = stats_of(Eigen::VectorXd::Zero(6), q * la.asDiagonal() * q.transpose());
  auto b = stats_of(Eigen::VectorXd::Zero(6), q * lb.asDiagonal() * q.transpose());
  double expect = 0.0;
  for (int i = 0; i < 6; ++i) {
    double d = std::sqrt(la(i)) - std::sqrt(lb(i));
    expect += d * d;
  }
  CHECK(frechet_distance(a, b) == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("symmetry and rotation invariance") {
  std::mt19937_64 rng(77);
  for (int d : {3, 8, 32}) {
    auto a = random_stats(d, rng, 0.7);
    auto b = random_stats(d, rng, 0.7);
    double ab = frechet_distance(a, b);
    double ba = frechet_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-8));

    auto q = random_orthogonal(d, rng);
    FeatureStats ar = stats_of(q * a.mu, q * a.sigma * q.transpose());
    FeatureStats br = stats_of(q * b.mu, q * b.sigma * q.transpose());
    CHECK(frechet_distance(ar, br) == doctest::Approx(ab).epsilon(1e-6));
  }
}

TEST_CASE("dimension mismatch is rejected") {
  auto a = stats_of(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  auto b = stats_of(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(frechet_distance(a, b), ArgumentError);
}

TEST_CASE("central_slice picks depth index 16 of 32") {
  Patch p({kPatchDepth, kPatchHeight, kPatchWidth});
  for (int64_t z = 0; z < kPatchDepth; ++z)
    for (int64_t y = 0; y < kPatchHeight; ++y)
      for (int64_t x = 0; x < kPatchWidth; ++x) p.at(z, y, x) = static_cast<float>(z) / 31.0f;
  auto slice = central_slice(p);
  CHECK(slice.height == kPatchHeight);
  CHECK(slice.width == kPatchWidth);
  for (float v : slice.data) CHECK(v == doctest::Approx(16.0f / 31.0f));
}

TEST_CASE("identical image sets have a vanishing distribution distance") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<Patch> patches;
  for (int i = 0; i < 12; ++i) {
    Patch p({kPatchDepth, kPatchHeight, kPatchWidth});
    for (auto& v : p.data) v = u(rng);
    patches.push_back(std::move(p));
  }
  VectorPatchSource real(patches), fake(patches);
  MeanPool2dExtractor pool(4);
  auto result = compute_fid(real, fake, pool, 12);
  CHECK(result.value <= 1e-6);
  CHECK(result.n_real == 12);
  CHECK(result.n_fake == 12);
}

TEST_CASE("swapping the sources leaves the value unchanged") {
  std::vector<Patch> a, b;
  for (int i = 0; i < 8; ++i) {
    a.push_back(constant_patch(-0.5f + 0.1f * i));
    b.push_back(constant_patch(0.3f - 0.05f * i));
  }
  // Constant patches give rank-deficient covariance; the regularized root
  // must still produce a symmetric, nonnegative answer.
  MeanPool2dExtractor pool(2);
  VectorPatchSource ra(a), fa(b), rb(b), fb(a);
  auto ab = compute_fid(ra, fa, pool, 8);
  auto ba = compute_fid(rb, fb, pool, 8);
  CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-7));
  CHECK(ab.value >= 0.0);
}

TEST_CASE("source exhaustion is an input error") {
  std::vector<Patch> few(3, constant_patch(0.0f));
  VectorPatchSource real(few), fake(few);
  MeanPool2dExtractor pool(2);
  CHECK_THROWS_AS(compute_fid(real, fake, pool, 5), LoadError);
}

TEST_CASE("two draws from one feature distribution stay near zero") {
  // Mini replica of the sampling-noise calibration: disjoint halves of one
  // Gaussian feature cloud must score far below a clearly separated pair.
  std::mt19937_64 rng(8080);
  std::normal_distribution<double> n(0.0, 1.0);
  const int N = 600, d = 16;
  auto draw = [&](double shift) {
    Eigen::MatrixXd rows(N, d);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < d; ++j) rows(i, j) = n(rng) + shift;
    return gaussian_stats(rows);
  };
  double same = frechet_distance(draw(0.0), draw(0.0));
  double apart = frechet_distance(draw(0.0), draw(2.0));
  CHECK(same < 0.5);
  CHECK(apart > 10.0 * same);
}

}  // TEST_SUITE
