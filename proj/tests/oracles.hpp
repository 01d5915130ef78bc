// Independent reference computations used as test oracles. They deliberately
// avoid the library's code paths (long double accumulation, textbook
// formulas, direct numerical integration).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "srgan/numeric_core.hpp"

namespace oracle {

inline std::vector<long double> column_mean(const srgan::FeatureBatch& b) {
  std::vector<long double> m(b.d(), 0.0L);
  for (std::size_t i = 0; i < b.n(); ++i)
    for (std::size_t j = 0; j < b.d(); ++j) m[j] += b(i, j);
  for (auto& v : m) v /= static_cast<long double>(b.n());
  return m;
}

// Population std via E[x^2] - E[x]^2 in long double.
inline std::vector<long double> column_std(const srgan::FeatureBatch& b) {
  const auto m = column_mean(b);
  std::vector<long double> s(b.d(), 0.0L);
  for (std::size_t i = 0; i < b.n(); ++i)
    for (std::size_t j = 0; j < b.d(); ++j) s[j] += static_cast<long double>(b(i, j)) * b(i, j);
  for (std::size_t j = 0; j < b.d(); ++j) {
    const long double var = s[j] / static_cast<long double>(b.n()) - m[j] * m[j];
    s[j] = std::sqrt(std::max(var, 0.0L));
  }
  return s;
}

// Pearson r from raw sums.
inline long double pearson(const srgan::FeatureBatch& b, std::size_t p, std::size_t q) {
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const auto n = static_cast<long double>(b.n());
  for (std::size_t i = 0; i < b.n(); ++i) {
    const long double x = b(i, p), y = b(i, q);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const long double cov = n * sxy - sx * sy;
  return cov / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

inline long double normal_pdf(long double x) {
  return std::exp(-0.5L * x * x) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
}

// Composite Simpson integral of the N(0, 1) density over [a, b].
inline long double normal_mass(long double a, long double b, int intervals = 2000) {
  const long double h = (b - a) / intervals;
  long double s = normal_pdf(a) + normal_pdf(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0L : 2.0L) * normal_pdf(a + i * h);
  return s * h / 3.0L;
}

inline long double kl(const std::vector<double>& p, const std::vector<double>& q) {
  long double s = 0;
  for (std::size_t k = 0; k < p.size(); ++k)
    s += static_cast<long double>(p[k]) * std::log(static_cast<long double>(p[k]) / q[k]);
  return s;
}

// Central-difference Jacobian of a vector-valued function of a vector.
template <typename F>
srgan::Matrix jacobian(F&& f, std::vector<double> x, double h = 1e-5) {
  const auto f0 = f(x);
  srgan::Matrix j(static_cast<Eigen::Index>(f0.size()), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const auto fp = f(x);
    x[i] = keep - h;
    const auto fm = f(x);
    x[i] = keep;
    for (std::size_t k = 0; k < f0.size(); ++k)
      j(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = (fp[k] - fm[k]) / (2 * h);
  }
  return j;
}

}  // namespace oracle
