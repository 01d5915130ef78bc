#include <doctest.h>

#include <omp.h>

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "srgan/prdc.hpp"
#include "srgan/prdc_reference.hpp"

using namespace srgan;

namespace {

double dist(const FeatureBatch& a, std::size_t i, const FeatureBatch& b, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.d(); ++c) {
    const double t = a(i, c) - b(j, c);
    s += t * t;
  }
  return std::sqrt(s);
}

std::vector<double> radii_oracle(const FeatureBatch& x, std::size_t k) {
  std::vector<double> r(x.n());
  for (std::size_t i = 0; i < x.n(); ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < x.n(); ++j)
      if (j != i) d.push_back(dist(x, i, x, j));
    std::sort(d.begin(), d.end());
    r[i] = d[k - 1];
  }
  return r;
}

// The four scores counted straight from the definitions.
PrdcScores prdc_oracle(const FeatureBatch& real, const FeatureBatch& fake, std::size_t k) {
  const auto rr = radii_oracle(real, k), rf = radii_oracle(fake, k);
  std::size_t precise = 0, recalled = 0, covered = 0, hits = 0;
  for (std::size_t j = 0; j < fake.n(); ++j) {
    bool in = false;
    for (std::size_t i = 0; i < real.n(); ++i) {
      if (dist(fake, j, real, i) <= rr[i]) {
        in = true;
        ++hits;
      }
    }
    precise += in;
  }
  for (std::size_t i = 0; i < real.n(); ++i) {
    bool in = false, cov = false;
    for (std::size_t j = 0; j < fake.n(); ++j) {
      if (dist(real, i, fake, j) <= rf[j]) in = true;
      if (dist(fake, j, real, i) <= rr[i]) cov = true;
    }
    recalled += in;
    covered += cov;
  }
  const auto nr = static_cast<double>(real.n()), nf = static_cast<double>(fake.n());
  return {static_cast<double>(precise) / nf,
          static_cast<double>(recalled) / nr,
          static_cast<double>(hits) / (static_cast<double>(k) * nf),
          static_cast<double>(covered) / nr,
          k, real.n(), fake.n()};
}

FeatureBatch offset(const FeatureBatch& b, double by) { return FeatureBatch(Matrix(b.data().array() + by)); }

}  // namespace

TEST_SUITE("prdc") {

TEST_CASE("knn_radius small sets") {
  const auto r = knn_radius(FeatureBatch(3, 1, {0, 1, 3}), 1);
  CHECK(r == std::vector<double>{1, 1, 2});
  const auto dup = knn_radius(FeatureBatch(4, 2, {1, 1, 1, 1, 5, 5, 5, 5}), 1);
  CHECK(dup == std::vector<double>{0, 0, 0, 0});
  CHECK_THROWS_AS(knn_radius(FeatureBatch(3, 1, {0, 1, 3}), 3), Error);
  CHECK_THROWS_AS(knn_radius(FeatureBatch(3, 1, {0, 1, 3}), 0), Error);
}

TEST_CASE("knn_radius matches brute force exactly") {
  const auto x = seeded_standard_normal(50, 4, 0);
  const auto want = radii_oracle(x, 5);
  CHECK(knn_radius(x, 5) == want);
  CHECK(reference::knn_radius(x, 5) == want);
}

TEST_CASE("far-apart sets score zero everywhere") {
  const auto real = seeded_standard_normal(40, 3, 1);
  const auto fake = offset(seeded_standard_normal(40, 3, 2), 1000.0);
  const auto s = compute_prdc(real, fake);
  CHECK(s.precision == 0.0);
  CHECK(s.recall == 0.0);
  CHECK(s.density == 0.0);
  CHECK(s.coverage == 0.0);
}

TEST_CASE("identical sets score one") {
  const auto x = seeded_standard_normal(60, 5, 3);
  for (std::size_t k : {1u, 3u, 5u, 10u}) {
    const auto s = compute_prdc(x, x, {k});
    CHECK(s.precision == 1.0);
    CHECK(s.recall == 1.0);
    CHECK(s.coverage == 1.0);
    CHECK(s.k == k);
  }
}

TEST_CASE("shifted normal sets match brute force bit-exactly") {
  const auto real = seeded_standard_normal(100, 4, 0);
  const auto fake = offset(seeded_standard_normal(100, 4, 1), 0.5);
  const auto s = compute_prdc(real, fake, {5});
  CHECK(s == prdc_oracle(real, fake, 5));
  CHECK(s == reference::compute_prdc(real, fake, {5}));
  CHECK(s.n_real == 100);
  CHECK(s.n_fake == 100);
}

TEST_CASE("oracle equivalence over random sizes") {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nr = 10 + rng.below(120), nf = 10 + rng.below(120);
    const std::size_t d = 1 + rng.below(8);
    const std::size_t k = 1 + rng.below(6);
    const auto real = seeded_standard_normal(nr, d, 500 + static_cast<std::uint64_t>(trial));
    const auto fake = offset(seeded_standard_normal(nf, d, 900 + static_cast<std::uint64_t>(trial)),
                             rng.uniform());
    const auto s = compute_prdc(real, fake, {k});
    CHECK(s == prdc_oracle(real, fake, k));
    CHECK(s.precision >= 0.0);
    CHECK(s.precision <= 1.0);
    CHECK(s.recall >= 0.0);
    CHECK(s.recall <= 1.0);
    CHECK(s.coverage >= 0.0);
    CHECK(s.coverage <= 1.0);
    CHECK(s.density >= 0.0);
  }
}

TEST_CASE("recall is precision with roles swapped") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = seeded_standard_normal(70, 3, seed);
    const auto b = offset(seeded_standard_normal(50, 3, seed + 50), 0.7);
    CHECK(compute_prdc(a, b, {3}).recall == compute_prdc(b, a, {3}).precision);
  }
}

TEST_CASE("rigid motions leave scores unchanged") {
  const auto real = seeded_standard_normal(80, 4, 10);
  const auto fake = offset(seeded_standard_normal(80, 4, 11), 0.4);
  const Eigen::HouseholderQR<Matrix> qr(seeded_standard_normal(4, 4, 12).data());
  const Matrix q = qr.householderQ();
  Eigen::RowVectorXd t(4);
  t << 3.0, -1.0, 0.5, 7.0;
  const auto move = [&](const FeatureBatch& b) {
    return FeatureBatch(Matrix((b.data() * q).rowwise() + t));
  };
  const auto s = compute_prdc(real, fake);
  const auto m = compute_prdc(move(real), move(fake));
  CHECK(std::abs(s.precision - m.precision) < 1e-9);
  CHECK(std::abs(s.recall - m.recall) < 1e-9);
  CHECK(std::abs(s.density - m.density) < 1e-9);
  CHECK(std::abs(s.coverage - m.coverage) < 1e-9);
}

TEST_CASE("scores do not depend on the thread count") {
  const auto real = seeded_standard_normal(150, 6, 20);
  const auto fake = offset(seeded_standard_normal(130, 6, 21), 0.3);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto one = compute_prdc(real, fake);
  omp_set_num_threads(4);
  const auto four = compute_prdc(real, fake);
  omp_set_num_threads(saved);
  CHECK(one == four);
}

TEST_CASE("invalid inputs are rejected") {
  const auto a = seeded_standard_normal(10, 3, 0);
  CHECK_THROWS_AS(compute_prdc(a, seeded_standard_normal(10, 2, 1)), Error);
  CHECK_THROWS_AS(compute_prdc(a, a, {0}), Error);
  CHECK_THROWS_AS(compute_prdc(a, seeded_standard_normal(5, 3, 1), {5}), Error);
}

}  // TEST_SUITE
