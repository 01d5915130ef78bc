#include "srgan/prdc_reference.hpp"

#include <algorithm>
#include <cmath>

namespace srgan::reference {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double diff = a[t] - b[t];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace

std::vector<double> knn_radius(const FeatureBatch& set, std::size_t k) {
  if (k == 0 || k >= set.n()) throw Error("knn_radius needs 1 <= k < N");
  std::vector<double> radii(set.n());
  for (std::size_t i = 0; i < set.n(); ++i) {
    std::vector<double> dist;
    for (std::size_t j = 0; j < set.n(); ++j) {
      if (j != i) dist.push_back(distance(set.row(i), set.row(j)));
    }
    std::sort(dist.begin(), dist.end());
    radii[i] = dist[k - 1];
  }
  return radii;
}

PrdcScores compute_prdc(const FeatureBatch& real, const FeatureBatch& fake,
                        const PrdcConfig& cfg) {
  validate_prdc_inputs(real, fake, cfg);
  const auto real_radii = reference::knn_radius(real, cfg.k);
  const auto fake_radii = reference::knn_radius(fake, cfg.k);

  std::size_t precise = 0;
  std::size_t ball_hits = 0;
  for (std::size_t j = 0; j < fake.n(); ++j) {
    bool inside = false;
    for (std::size_t i = 0; i < real.n(); ++i) {
      if (distance(fake.row(j), real.row(i)) <= real_radii[i]) {
        inside = true;
        ++ball_hits;
      }
    }
    if (inside) ++precise;
  }

  std::size_t recalled = 0;
  for (std::size_t i = 0; i < real.n(); ++i) {
    for (std::size_t j = 0; j < fake.n(); ++j) {
      if (distance(real.row(i), fake.row(j)) <= fake_radii[j]) {
        ++recalled;
        break;
      }
    }
  }

  std::size_t covered = 0;
  for (std::size_t i = 0; i < real.n(); ++i) {
    for (std::size_t j = 0; j < fake.n(); ++j) {
      if (distance(real.row(i), fake.row(j)) <= real_radii[i]) {
        ++covered;
        break;
      }
    }
  }

  const auto n_real = static_cast<double>(real.n());
  const auto n_fake = static_cast<double>(fake.n());
  PrdcScores s;
  s.precision = static_cast<double>(precise) / n_fake;
  s.recall = static_cast<double>(recalled) / n_real;
  s.density = static_cast<double>(ball_hits) / (static_cast<double>(cfg.k) * n_fake);
  s.coverage = static_cast<double>(covered) / n_real;
  s.k = cfg.k;
  s.n_real = real.n();
  s.n_fake = fake.n();
  return s;
}

}  // namespace srgan::reference
