#include <doctest.h>

#include <cmath>

#include <Eigen/Cholesky>

#include "oracles.hpp"
#include "srgan/restriction_losses.hpp"

using namespace srgan;

namespace {

// Rows of a seeded normal batch, whitened so the batch has mean 0, population
// std 1 and identity correlation up to rounding.
FeatureBatch whitened_batch(std::size_t n, std::size_t d, std::uint64_t seed) {
  Matrix x = seeded_standard_normal(n, d, seed).data();
  x.rowwise() -= x.colwise().mean();
  const Matrix cov = (x.transpose() * x) / static_cast<double>(n);
  const Eigen::LLT<Matrix> llt(cov);
  const Matrix w = llt.matrixU().solve(Matrix::Identity(static_cast<Eigen::Index>(d),
                                                        static_cast<Eigen::Index>(d)));
  return FeatureBatch(Matrix(x * w));
}

FeatureBatch shifted(const FeatureBatch& b, double by) {
  return FeatureBatch(Matrix(b.data().array() + by));
}

// batch_kl straight from the formula with long-double moments.
double batch_kl_oracle(const FeatureBatch& b) {
  const auto m = oracle::column_mean(b);
  const auto s = oracle::column_std(b);
  long double v = 0;
  for (std::size_t j = 0; j < b.d(); ++j) {
    const long double sd = std::max(s[j], static_cast<long double>(kStdFloor));
    v += m[j] * m[j] + sd * sd - std::log(sd * sd) - 1;
  }
  return static_cast<double>(v / 2);
}

double correlation_oracle(const FeatureBatch& b) {
  long double v = 0;
  for (std::size_t p = 0; p < b.d(); ++p)
    for (std::size_t q = 0; q < b.d(); ++q)
      if (p != q) v += std::abs(oracle::pearson(b, p, q));
  return static_cast<double>(v / static_cast<long double>(b.d() * b.d()));
}

}  // namespace

TEST_SUITE("restriction_losses") {

TEST_CASE("conventional_kl closed forms") {
  const VaeMoments zero(Matrix::Zero(3, 4), Matrix::Zero(3, 4));
  const auto z = conventional_kl(zero);
  CHECK(z.value == 0.0);
  CHECK(z.grad_mu.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.grad_logvar.cwiseAbs().maxCoeff() == 0.0);

  const VaeMoments one(Matrix::Ones(1, 1), Matrix::Zero(1, 1));
  const auto o = conventional_kl(one);
  CHECK(o.value == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(o.grad_mu(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(VaeMoments(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), Error);
}

TEST_CASE("conventional_kl gradients match finite differences") {
  const Matrix mu = seeded_standard_normal(16, 4, 0).data();
  const Matrix lv = 0.5 * seeded_standard_normal(16, 4, 1).data();
  const auto e = conventional_kl(VaeMoments(mu, lv));
  const auto g_mu = finite_diff_grad(
      [&](const Matrix& m) { return conventional_kl(VaeMoments(m, lv)).value; }, mu);
  const auto g_lv = finite_diff_grad(
      [&](const Matrix& l) { return conventional_kl(VaeMoments(mu, l)).value; }, lv);
  CHECK(max_relative_error(e.grad_mu, g_mu) < 1e-4);
  CHECK(max_relative_error(e.grad_logvar, g_lv) < 1e-4);

  // The FeatureBatch wrapper is the logvar = 0 case.
  const FeatureBatch b(mu);
  const auto w = conventional_kl(b);
  const auto ref = conventional_kl(VaeMoments(mu, Matrix::Zero(16, 4)));
  CHECK(w.value == ref.value);
  CHECK(w.grad == ref.grad_mu);
}

TEST_CASE("batch_kl closed forms") {
  const auto unit = batch_kl(FeatureBatch(2, 3, {-1, -1, -1, 1, 1, 1}));
  CHECK(std::abs(unit.value) < 1e-12);
  CHECK(unit.grad.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(batch_kl(FeatureBatch(2, 1, {0, 2})).value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("batch_kl matches the formula and finite differences") {
  const auto b = seeded_standard_normal(64, 8, 0);
  const auto e = batch_kl(b);
  CHECK(e.value == doctest::Approx(batch_kl_oracle(b)).epsilon(1e-10));
  const auto fd = finite_diff_grad([](const FeatureBatch& x) { return batch_kl(x).value; }, b);
  CHECK(max_relative_error(e.grad, fd) < 1e-4);
}

TEST_CASE("correlation_loss closed forms") {
  const FeatureBatch orth(4, 2, {1, 1, 1, -1, -1, 1, -1, -1});
  const auto z = correlation_loss(orth);
  CHECK(std::abs(z.value) < 1e-12);
  const auto dup = correlation_loss(FeatureBatch(3, 2, {1, 1, 2, 2, 4, 4}));
  CHECK(dup.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(correlation_loss(FeatureBatch(3, 1, {1, 2, 3})), Error);
}

TEST_CASE("correlation_loss matches the formula and finite differences") {
  const auto b = seeded_standard_normal(32, 4, 0);
  const auto e = correlation_loss(b);
  CHECK(e.value == doctest::Approx(correlation_oracle(b)).epsilon(1e-10));
  const auto c = corr_mat(b);
  bool near_kink = false;
  for (Eigen::Index p = 0; p < 4; ++p)
    for (Eigen::Index q = 0; q < 4; ++q)
      if (p != q && std::abs(c.m(p, q)) < 1e-6) near_kink = true;
  REQUIRE_FALSE(near_kink);
  const auto fd =
      finite_diff_grad([](const FeatureBatch& x) { return correlation_loss(x).value; }, b);
  CHECK(max_relative_error(e.grad, fd) < 1e-3);
}

TEST_CASE("histogram_imitation_loss examples") {
  const auto b = seeded_standard_normal(10000, 2, 0);
  const double base = histogram_imitation_loss(b).value;
  CHECK(base < 0.05);
  CHECK(histogram_imitation_loss(shifted(b, 3.0)).value > base);

  const auto small = seeded_standard_normal(64, 2, 0);
  const auto e = histogram_imitation_loss(small);
  const auto fd = finite_diff_grad(
      [](const FeatureBatch& x) { return histogram_imitation_loss(x).value; }, small);
  CHECK(max_relative_error(e.grad, fd) < 1e-4);
}

TEST_CASE("histogram_imitation_loss averages per-dimension KL") {
  const HistogramSpec spec;
  const auto b = seeded_standard_normal(200, 3, 5);
  const auto ref = gaussian_reference(spec);
  long double want = 0;
  for (std::size_t j = 0; j < 3; ++j) want += oracle::kl(soft_hist(b.column(j), spec).freqs, ref.freqs);
  CHECK(histogram_imitation_loss(b, spec).value == doctest::Approx(static_cast<double>(want / 3)).epsilon(1e-12));
}

TEST_CASE("combined_restriction weighting") {
  const auto b = seeded_standard_normal(64, 4, 3);
  LossWeights none;
  none.lambda_bkl = none.lambda_corr_enc = none.lambda_hist = 0.0;
  const auto z = combined_restriction(b, none);
  CHECK(z.value == 0.0);
  CHECK(z.grad.cwiseAbs().maxCoeff() == 0.0);

  const LossWeights w = LossWeights::defaults();
  const double manual = 10.0 * batch_kl(b).value + 100.0 * correlation_loss(b).value +
                        100.0 * histogram_imitation_loss(b).value;
  const auto c = combined_restriction(b, w);
  CHECK(std::abs(c.value - manual) < 1e-12 * std::max(1.0, manual));
  const Matrix g = 10.0 * batch_kl(b).grad + 100.0 * correlation_loss(b).grad +
                   100.0 * histogram_imitation_loss(b).grad;
  CHECK((c.grad - g).cwiseAbs().maxCoeff() < 1e-10);

  const auto o = restriction_objective(b, w);
  CHECK(o.value == doctest::Approx(c.value + 0.1 * conventional_kl(b).value).epsilon(1e-14));
}

TEST_CASE("whitened batch sits at the zeros of batch_kl and correlation_loss") {
  const auto b = whitened_batch(10000, 4, 1);
  CHECK(std::abs(batch_kl(b).value) < 1e-9);
  CHECK(std::abs(correlation_loss(b).value) < 1e-9);
  CHECK(histogram_imitation_loss(b).value < 0.05);
}

TEST_CASE("zero only at the target") {
  const auto b = whitened_batch(500, 3, 2);
  CHECK(std::abs(batch_kl(b).value) < 1e-9);
  CHECK(batch_kl(shifted(b, 0.1)).value > 1e-4);
  CHECK(batch_kl(FeatureBatch(Matrix(1.1 * b.data()))).value > 1e-4);
  Matrix mixed = b.data();
  mixed.col(1) += 0.2 * mixed.col(0);
  CHECK(correlation_loss(FeatureBatch(mixed)).value > 1e-4);
}

TEST_CASE("loss values are non-negative across seeds and scales") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double scale = 0.01 * std::pow(10.0, static_cast<double>(seed % 5));
    const FeatureBatch b(Matrix(scale * seeded_standard_normal(16, 3, seed).data()));
    CHECK(conventional_kl(b).value >= 0.0);
    CHECK(batch_kl(b).value >= 0.0);
    CHECK(correlation_loss(b).value >= 0.0);
    CHECK(histogram_imitation_loss(b).value >= 0.0);
    CHECK(b.data().allFinite());
  }
}

TEST_CASE("gradient descent on the combined objective makes progress") {
  for (double offset : {0.0, 2.0}) {
    Matrix x = (seeded_standard_normal(128, 8, 0).data().array() + offset).matrix();
    const auto w = LossWeights::defaults();
    const double initial = combined_restriction(FeatureBatch(x), w).value;
    for (int step = 0; step < 500; ++step) x -= 0.05 * combined_restriction(FeatureBatch(x), w).grad;
    CHECK(combined_restriction(FeatureBatch(x), w).value < 0.1 * initial);
  }
}

TEST_CASE("collapse asymmetry between per-sample and batch KL") {
  const std::size_t d = 8;
  const FeatureBatch collapsed(Matrix::Zero(16, static_cast<Eigen::Index>(d)));
  CHECK(conventional_kl(collapsed).value == 0.0);
  const double bound = 0.5 * static_cast<double>(d) * (-std::log(kStdFloor * kStdFloor) - 1.0);
  CHECK(batch_kl(collapsed).value >= bound);
  CHECK(std::isfinite(correlation_loss(collapsed).value));
  CHECK(collapsed.n() == 16);
}

TEST_CASE("twenty seeded batches pass every gradient check") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto b = seeded_standard_normal(32, 8, 1000 + seed);
    const auto fd_b = finite_diff_grad([](const FeatureBatch& x) { return batch_kl(x).value; }, b);
    CHECK(max_relative_error(batch_kl(b).grad, fd_b) < 1e-4);
    const auto fd_h = finite_diff_grad(
        [](const FeatureBatch& x) { return histogram_imitation_loss(x).value; }, b);
    CHECK(max_relative_error(histogram_imitation_loss(b).grad, fd_h) < 1e-4);
  }
}

}  // TEST_SUITE
