#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "srgan/numeric_core.hpp"

namespace srgan {

/// Additive smoothing applied to every bin mass before normalization.
inline constexpr double kHistogramEpsilon = 1e-10;

/// Range, resolution and kernel width of a Gaussian histogram.
class HistogramSpec {
 public:
  /// Defaults: range [-10, 10], 50 bins, kernel sigma 0.2.
  HistogramSpec() = default;
  HistogramSpec(double max, double min, std::size_t bins, double sigma);

  double max() const { return max_; }
  double min() const { return min_; }
  std::size_t bins() const { return bins_; }
  double sigma() const { return sigma_; }
  /// Bin width (max - min) / bins.
  double width() const { return (max_ - min_) / static_cast<double>(bins_); }

  friend bool operator==(const HistogramSpec&, const HistogramSpec&) = default;

 private:
  double max_ = 10.0;
  double min_ = -10.0;
  std::size_t bins_ = 50;
  double sigma_ = 0.2;
};

struct SoftHistogram {
  std::vector<double> centers;
  /// Smoothed, normalized bin probabilities.
  std::vector<double> freqs;
  /// Sum of the unsmoothed kernel masses.
  double raw_mass = 0.0;
};

struct SoftHistogramGrad {
  SoftHistogram hist;
  /// bins x n, d freqs[k] / d samples[i].
  Matrix jacobian;
};

std::vector<double> bin_centers(const HistogramSpec& spec);

/// Gaussian-kernel soft histogram of one sample vector.
///
/// Each sample contributes Δw·N(μ_k; x_i, σ²) to bin k. Samples outside
/// [min, max] are not clamped: the kernel tails still reach the edge bins,
/// which keeps a gradient pointing back into range.
SoftHistogram soft_hist(std::span<const double> samples, const HistogramSpec& spec);

SoftHistogramGrad soft_hist_with_grad(std::span<const double> samples, const HistogramSpec& spec);

/// Expected soft histogram of N(0, 1) samples: the bin masses of N(0, 1 + σ²).
SoftHistogram gaussian_reference(const HistogramSpec& spec);

/// KL(p || q) over bins. Both histograms must share bin centers.
double hist_kl(const SoftHistogram& p, const SoftHistogram& q);

}  // namespace srgan
