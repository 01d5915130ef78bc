#pragma once

#include <vector>

#include "srgan/prdc.hpp"

/// Serial O(N²) implementations kept as the oracle for the parallel kernels.
namespace srgan::reference {

std::vector<double> knn_radius(const FeatureBatch& set, std::size_t k);

PrdcScores compute_prdc(const FeatureBatch& real, const FeatureBatch& fake,
                        const PrdcConfig& cfg = {});

}  // namespace srgan::reference
