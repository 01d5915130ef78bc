#include "srgan/prdc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <omp.h>

namespace srgan {

namespace {

// Summation runs over coordinates in index order so every caller gets the
// same bits for the same pair, regardless of argument order.
inline double euclidean(const double* a, const double* b, std::size_t d) {
  double sum = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    const double diff = a[t] - b[t];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace

void validate_prdc_inputs(const FeatureBatch& real, const FeatureBatch& fake,
                          const PrdcConfig& cfg) {
  if (real.d() != fake.d()) {
    throw Error("prdc: real features have dimension " + std::to_string(real.d()) +
                " but fake features have " + std::to_string(fake.d()));
  }
  if (cfg.k == 0 || cfg.k >= std::min(real.n(), fake.n())) {
    throw Error("prdc: k = " + std::to_string(cfg.k) + " must satisfy 1 <= k < min(" +
                std::to_string(real.n()) + ", " + std::to_string(fake.n()) + ")");
  }
}

std::vector<double> knn_radius(const FeatureBatch& set, std::size_t k) {
  const std::size_t n = set.n();
  if (k == 0 || k >= n) {
    throw Error("knn_radius: k = " + std::to_string(k) + " must satisfy 1 <= k < " +
                std::to_string(n));
  }
  const std::size_t d = set.d();
  const double* x = set.data().data();
  std::vector<double> radii(n);

#pragma omp parallel
  {
    std::vector<double> dist(n - 1);
#pragma omp for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::size_t m = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) dist[m++] = euclidean(x + i * d, x + j * d, d);
      }
      std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1),
                       dist.end());
      radii[i] = dist[k - 1];
    }
  }
  return radii;
}

PrdcScores compute_prdc(const FeatureBatch& real, const FeatureBatch& fake,
                        const PrdcConfig& cfg) {
  validate_prdc_inputs(real, fake, cfg);
  const auto real_radii = knn_radius(real, cfg.k);
  const auto fake_radii = knn_radius(fake, cfg.k);
  const std::size_t n_real = real.n();
  const std::size_t n_fake = fake.n();
  const std::size_t d = real.d();
  const double* xr = real.data().data();
  const double* xf = fake.data().data();

  // One pass over the real x fake distance table, one real row per task.
  // Integer counters make the merge order irrelevant.
  std::vector<std::uint64_t> fake_hits(n_fake, 0);
  std::uint64_t recalled = 0;
  std::uint64_t covered = 0;

#pragma omp parallel
  {
    std::vector<std::uint64_t> local_hits(n_fake, 0);
#pragma omp for schedule(static) reduction(+ : recalled, covered)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n_real); ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      bool in_fake_manifold = false;
      bool has_fake_neighbour = false;
      for (std::size_t j = 0; j < n_fake; ++j) {
        const double dist = euclidean(xr + i * d, xf + j * d, d);
        if (dist <= real_radii[i]) {
          ++local_hits[j];
          has_fake_neighbour = true;
        }
        if (dist <= fake_radii[j]) in_fake_manifold = true;
      }
      recalled += in_fake_manifold ? 1 : 0;
      covered += has_fake_neighbour ? 1 : 0;
    }
#pragma omp critical(srgan_prdc_merge)
    for (std::size_t j = 0; j < n_fake; ++j) fake_hits[j] += local_hits[j];
  }

  std::uint64_t precise = 0;
  std::uint64_t ball_hits = 0;
  for (const auto hits : fake_hits) {
    precise += hits > 0 ? 1 : 0;
    ball_hits += hits;
  }

  PrdcScores s;
  s.precision = static_cast<double>(precise) / static_cast<double>(n_fake);
  s.recall = static_cast<double>(recalled) / static_cast<double>(n_real);
  s.density = static_cast<double>(ball_hits) /
              (static_cast<double>(cfg.k) * static_cast<double>(n_fake));
  s.coverage = static_cast<double>(covered) / static_cast<double>(n_real);
  s.k = cfg.k;
  s.n_real = n_real;
  s.n_fake = n_fake;
  return s;
}

}  // namespace srgan
