#include "srgan/soft_histogram.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace srgan {

namespace {

void require_finite_samples(std::span<const double> samples) {
  if (samples.empty()) throw Error("soft_hist needs at least one sample");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      throw Error("soft_hist: sample " + std::to_string(i) + " is not finite");
    }
  }
}

// Smooths and normalizes raw bin masses in place; returns the raw total.
double normalize(std::vector<double>& mass) {
  double raw = 0.0;
  double total = 0.0;
  for (double m : mass) {
    raw += m;
    total += m + kHistogramEpsilon;
  }
  for (double& m : mass) m = (m + kHistogramEpsilon) / total;
  return raw;
}

}  // namespace

HistogramSpec::HistogramSpec(double max, double min, std::size_t bins, double sigma)
    : max_(max), min_(min), bins_(bins), sigma_(sigma) {
  if (!std::isfinite(max) || !std::isfinite(min) || !(max > min)) {
    throw Error("histogram spec needs finite max > min");
  }
  if (bins < 2) throw Error("histogram spec needs at least 2 bins");
  if (!std::isfinite(sigma) || !(sigma > 0.0)) throw Error("histogram spec needs sigma > 0");
}

std::vector<double> bin_centers(const HistogramSpec& spec) {
  const double w = spec.width();
  std::vector<double> c(spec.bins());
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = spec.min() + (static_cast<double>(k) + 0.5) * w;
  }
  return c;
}

SoftHistogram soft_hist(std::span<const double> samples, const HistogramSpec& spec) {
  require_finite_samples(samples);
  SoftHistogram h;
  h.centers = bin_centers(spec);
  const double w = spec.width();
  const double s = spec.sigma();
  const double scale = w / (s * std::sqrt(2.0 * std::numbers::pi));
  const double inv_var = 1.0 / (s * s);
  std::vector<double> mass(spec.bins(), 0.0);
  for (double x : samples) {
    for (std::size_t k = 0; k < mass.size(); ++k) {
      const double u = x - h.centers[k];
      mass[k] += scale * std::exp(-0.5 * u * u * inv_var);
    }
  }
  h.raw_mass = normalize(mass);
  h.freqs = std::move(mass);
  return h;
}

SoftHistogramGrad soft_hist_with_grad(std::span<const double> samples,
                                      const HistogramSpec& spec) {
  require_finite_samples(samples);
  const std::size_t bins = spec.bins();
  const std::size_t n = samples.size();
  const auto centers = bin_centers(spec);
  const double w = spec.width();
  const double s = spec.sigma();
  const double scale = w / (s * std::sqrt(2.0 * std::numbers::pi));
  const double inv_var = 1.0 / (s * s);

  // dmass(k, i) = d mass_k / d x_i
  Matrix dmass(static_cast<Eigen::Index>(bins), static_cast<Eigen::Index>(n));
  std::vector<double> mass(bins, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = samples[i];
    for (std::size_t k = 0; k < bins; ++k) {
      const double u = x - centers[k];
      const double g = scale * std::exp(-0.5 * u * u * inv_var);
      mass[k] += g;
      dmass(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = -u * inv_var * g;
    }
  }

  SoftHistogramGrad out;
  out.hist.centers = centers;
  double total = 0.0;
  for (double m : mass) total += m + kHistogramEpsilon;
  out.hist.raw_mass = normalize(mass);
  out.hist.freqs = std::move(mass);

  // p_k = (m_k + eps) / S  =>  dp_k = (dm_k - p_k * sum_j dm_j) / S
  const Eigen::RowVectorXd column_sums = dmass.colwise().sum();
  out.jacobian = dmass;
  for (std::size_t k = 0; k < bins; ++k) {
    const double p = out.hist.freqs[k];
    const auto kk = static_cast<Eigen::Index>(k);
    out.jacobian.row(kk) = (dmass.row(kk) - p * column_sums) / total;
  }
  return out;
}

SoftHistogram gaussian_reference(const HistogramSpec& spec) {
  SoftHistogram h;
  h.centers = bin_centers(spec);
  const double var = 1.0 + spec.sigma() * spec.sigma();
  const double scale = spec.width() / std::sqrt(2.0 * std::numbers::pi * var);
  std::vector<double> mass(spec.bins());
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double mu = h.centers[k];
    mass[k] = scale * std::exp(-mu * mu / (2.0 * var));
  }
  h.raw_mass = normalize(mass);
  h.freqs = std::move(mass);
  return h;
}

double hist_kl(const SoftHistogram& p, const SoftHistogram& q) {
  if (p.centers != q.centers || p.freqs.size() != q.freqs.size() ||
      p.freqs.size() != p.centers.size()) {
    throw Error("hist_kl: histograms have different bin centers");
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < p.freqs.size(); ++k) {
    kl += p.freqs[k] * std::log(p.freqs[k] / q.freqs[k]);
  }
  // Rounding can leave a tiny negative residue when p == q.
  return kl > 0.0 ? kl : 0.0;
}

}  // namespace srgan
