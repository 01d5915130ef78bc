#pragma once

#include <cstddef>
#include <vector>

#include "srgan/numeric_core.hpp"

namespace srgan {

struct PrdcConfig {
  /// Neighbour rank defining each kNN ball; 1 <= k < min(N_real, N_fake).
  std::size_t k = 5;
};

struct PrdcScores {
  double precision = 0.0;
  double recall = 0.0;
  double density = 0.0;
  double coverage = 0.0;
  std::size_t k = 0;
  std::size_t n_real = 0;
  std::size_t n_fake = 0;

  friend bool operator==(const PrdcScores&, const PrdcScores&) = default;
};

/// Euclidean distance from every point to its k-th nearest neighbour in the
/// same set (the point itself excluded, duplicates included).
///
/// Rows are processed in parallel; each radius is computed by one thread in
/// a fixed order, so the output does not depend on the thread count.
std::vector<double> knn_radius(const FeatureBatch& set, std::size_t k);

/// Precision, recall, density and coverage of `fake` against `real`.
/// A point at distance exactly equal to a radius counts as inside the ball.
PrdcScores compute_prdc(const FeatureBatch& real, const FeatureBatch& fake,
                        const PrdcConfig& cfg = {});

/// Throws Error unless cfg.k is valid for both set sizes and the dimensions match.
void validate_prdc_inputs(const FeatureBatch& real, const FeatureBatch& fake,
                          const PrdcConfig& cfg);

}  // namespace srgan
