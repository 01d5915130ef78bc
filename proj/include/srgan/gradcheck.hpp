#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "srgan/soft_histogram.hpp"

namespace srgan {

struct GradcheckResult {
  std::string loss;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  std::size_t batches_checked = 0;
  /// Batches skipped because some |correlation| sat within 1e-6 of the kink.
  std::size_t batches_skipped = 0;
  bool passed() const { return max_rel_error < tolerance; }
};

struct GradcheckOptions {
  std::size_t batches = 20;
  std::size_t n = 32;
  std::size_t d = 8;
  double step = 1e-5;
  std::uint64_t seed = 0;
  HistogramSpec spec;
};

/// Compares every restriction loss's analytic gradient with central finite
/// differences on seeded N(0, 1) batches (batch b uses seed + b). The VAE
/// form of the conventional KL is checked on (mu, logvar) jointly.
std::vector<GradcheckResult> run_gradcheck(const GradcheckOptions& opt = {});

}  // namespace srgan
