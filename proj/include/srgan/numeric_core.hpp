#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace srgan {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floor applied to per-column standard deviations before any division.
inline constexpr double kStdFloor = 1e-8;

/// Dense N x D batch of encoded features, one sample per row.
///
/// Immutable after construction. Construction rejects empty shapes and
/// non-finite entries; statistics operations additionally require N >= 2.
class FeatureBatch {
 public:
  explicit FeatureBatch(Matrix data);
  FeatureBatch(std::size_t n, std::size_t d, std::vector<double> row_major);

  const Matrix& data() const { return data_; }
  std::size_t n() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t d() const { return static_cast<std::size_t>(data_.cols()); }
  double operator()(std::size_t i, std::size_t j) const {
    return data_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * d(), d()};
  }
  std::vector<double> column(std::size_t j) const;

  friend bool operator==(const FeatureBatch& a, const FeatureBatch& b) {
    return a.data_.rows() == b.data_.rows() && a.data_.cols() == b.data_.cols() &&
           a.data_ == b.data_;
  }

 private:
  Matrix data_;
};

/// Per-column mean and population (divisor N) standard deviation.
struct ColumnStats {
  Vector mean;
  Vector std;
};

/// Pearson correlation matrix. Symmetric, unit diagonal, entries in [-1, 1].
struct CorrMatrix {
  Matrix m;
};

/// Seedable pseudo-random stream.
///
/// Engine: std::mt19937_64, whose output sequence is fixed by the standard.
/// Seeding: the engine is seeded with splitmix64(seed ^ splitmix64(stream)),
/// so (seed, stream) pairs give independent, reproducible streams. Normals
/// come from Box-Muller on 53-bit uniforms; no std:: distribution is used
/// because their algorithms are implementation-defined.
class Rng {
 public:
  static constexpr const char* kName = "srgan-mt19937_64-splitmix-boxmuller/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent child stream; the parent's state is not advanced.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream_ * 0x100000001b3ULL + stream + 1); }

  double uniform();
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

FeatureBatch seeded_standard_normal(std::size_t n, std::size_t d, std::uint64_t seed);

ColumnStats column_stats(const FeatureBatch& b);

/// Pearson correlations with std floored at kStdFloor; diagonal forced to 1.
CorrMatrix corr_mat(const FeatureBatch& b);

/// Central-difference gradient of f at x. Throws on a non-finite evaluation.
Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, const Matrix& x,
                        double h = 1e-5);
Matrix finite_diff_grad(const std::function<double(const FeatureBatch&)>& f,
                        const FeatureBatch& b, double h = 1e-5);

/// Largest entrywise |a - g| / max(1, |a|, |g|).
double max_relative_error(const Matrix& analytic, const Matrix& numeric);

/// Throws Error if the batch is too small for batch statistics.
void require_statistics_shape(const FeatureBatch& b, const char* what);

}  // namespace srgan
