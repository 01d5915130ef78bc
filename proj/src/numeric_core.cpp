#include "srgan/numeric_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace srgan {

namespace {

void require_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        throw Error("feature batch entry (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") is not finite");
      }
    }
  }
}

}  // namespace

FeatureBatch::FeatureBatch(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw Error("feature batch must have at least one row and one column");
  }
  require_finite(data_);
}

FeatureBatch::FeatureBatch(std::size_t n, std::size_t d, std::vector<double> row_major) {
  if (n == 0 || d == 0) throw Error("feature batch must have at least one row and one column");
  if (row_major.size() != n * d) {
    throw Error("feature batch expects " + std::to_string(n * d) + " values, got " +
                std::to_string(row_major.size()));
  }
  data_ = Eigen::Map<const Matrix>(row_major.data(), static_cast<Eigen::Index>(n),
                                   static_cast<Eigen::Index>(d));
  require_finite(data_);
}

std::vector<double> FeatureBatch::column(std::size_t j) const {
  if (j >= d()) throw Error("column index out of range");
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = (*this)(i, j);
  return out;
}

void require_statistics_shape(const FeatureBatch& b, const char* what) {
  if (b.n() < 2) throw Error(std::string(what) + " needs at least 2 samples");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(seed ^ splitmix64(stream))) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("Rng::below needs a positive bound");
  // Rejection keeps the result unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

FeatureBatch seeded_standard_normal(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n == 0 || d == 0) throw Error("seeded_standard_normal needs n >= 1 and d >= 1");
  Rng rng(seed);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
  return FeatureBatch(std::move(m));
}

ColumnStats column_stats(const FeatureBatch& b) {
  require_statistics_shape(b, "column_stats");
  const auto& x = b.data();
  const double inv_n = 1.0 / static_cast<double>(b.n());
  ColumnStats s{Vector::Zero(x.cols()), Vector::Zero(x.cols())};
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) s.mean[j] += x(i, j);
  }
  s.mean *= inv_n;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double c = x(i, j) - s.mean[j];
      s.std[j] += c * c;
    }
  }
  for (Eigen::Index j = 0; j < x.cols(); ++j) s.std[j] = std::sqrt(s.std[j] * inv_n);
  return s;
}

CorrMatrix corr_mat(const FeatureBatch& b) {
  require_statistics_shape(b, "corr_mat");
  const auto stats = column_stats(b);
  const auto& x = b.data();
  const Eigen::Index d = x.cols();
  const double inv_n = 1.0 / static_cast<double>(b.n());
  Matrix m = Matrix::Identity(d, d);
  for (Eigen::Index p = 0; p < d; ++p) {
    const double sp = std::max(stats.std[p], kStdFloor);
    for (Eigen::Index q = p + 1; q < d; ++q) {
      const double sq = std::max(stats.std[q], kStdFloor);
      double cov = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        cov += (x(i, p) - stats.mean[p]) * (x(i, q) - stats.mean[q]);
      }
      const double r = std::clamp(cov * inv_n / (sp * sq), -1.0, 1.0);
      m(p, q) = r;
      m(q, p) = r;
    }
  }
  return {std::move(m)};
}

Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, const Matrix& x,
                        double h) {
  if (!(h > 0.0)) throw Error("finite_diff_grad needs a positive step");
  Matrix probe = x;
  Matrix grad(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double orig = probe(i, j);
      probe(i, j) = orig + h;
      const double up = f(probe);
      probe(i, j) = orig - h;
      const double down = f(probe);
      probe(i, j) = orig;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw Error("finite_diff_grad: non-finite evaluation at entry (" + std::to_string(i) +
                    ", " + std::to_string(j) + ")");
      }
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

Matrix finite_diff_grad(const std::function<double(const FeatureBatch&)>& f,
                        const FeatureBatch& b, double h) {
  return finite_diff_grad([&f](const Matrix& m) { return f(FeatureBatch(m)); }, b.data(), h);
}

double max_relative_error(const Matrix& analytic, const Matrix& numeric) {
  if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
    throw Error("max_relative_error: shape mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i) {
    for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
      const double a = analytic(i, j);
      const double g = numeric(i, j);
      const double denom = std::max({1.0, std::abs(a), std::abs(g)});
      worst = std::max(worst, std::abs(a - g) / denom);
    }
  }
  return worst;
}

}  // namespace srgan
