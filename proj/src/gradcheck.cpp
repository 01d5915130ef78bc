#include "srgan/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "srgan/restriction_losses.hpp"

namespace srgan {

namespace {

constexpr double kTolerance = 1e-4;
constexpr double kCorrelationTolerance = 1e-3;
constexpr double kKinkMargin = 1e-6;

bool near_kink(const FeatureBatch& b) {
  const auto c = corr_mat(b);
  for (Eigen::Index p = 0; p < c.m.rows(); ++p) {
    for (Eigen::Index q = 0; q < c.m.cols(); ++q) {
      if (p != q && std::abs(c.m(p, q)) < kKinkMargin) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<GradcheckResult> run_gradcheck(const GradcheckOptions& opt) {
  GradcheckResult kl{"conventional_kl", 0.0, kTolerance};
  GradcheckResult bkl{"batch_kl", 0.0, kTolerance};
  GradcheckResult corr{"correlation_loss", 0.0, kCorrelationTolerance};
  GradcheckResult hist{"histogram_imitation_loss", 0.0, kTolerance};

  for (std::size_t t = 0; t < opt.batches; ++t) {
    const auto b = seeded_standard_normal(opt.n, opt.d, opt.seed + t);

    // (mu, logvar) stacked side by side so one finite-difference sweep covers both.
    const auto lv = seeded_standard_normal(opt.n, opt.d, opt.seed + t + 0x5eed0000ULL);
    Matrix stacked(b.data().rows(), 2 * b.data().cols());
    stacked << b.data(), 0.5 * lv.data();
    const auto split = [&](const Matrix& s) {
      return VaeMoments(s.leftCols(b.data().cols()), s.rightCols(b.data().cols()));
    };
    const auto analytic_kl = conventional_kl(split(stacked));
    Matrix analytic_stacked(stacked.rows(), stacked.cols());
    analytic_stacked << analytic_kl.grad_mu, analytic_kl.grad_logvar;
    const auto numeric_kl = finite_diff_grad(
        [&](const Matrix& s) { return conventional_kl(split(s)).value; }, stacked, opt.step);
    kl.max_rel_error = std::max(kl.max_rel_error, max_relative_error(analytic_stacked, numeric_kl));
    ++kl.batches_checked;

    const auto check = [&](GradcheckResult& r, auto&& loss) {
      const auto numeric = finite_diff_grad(
          [&](const FeatureBatch& x) { return loss(x).value; }, b, opt.step);
      r.max_rel_error = std::max(r.max_rel_error, max_relative_error(loss(b).grad, numeric));
      ++r.batches_checked;
    };
    check(bkl, [](const FeatureBatch& x) { return batch_kl(x); });
    if (opt.d >= 2) {
      if (near_kink(b)) {
        ++corr.batches_skipped;
      } else {
        check(corr, [](const FeatureBatch& x) { return correlation_loss(x); });
      }
    }
    check(hist, [&](const FeatureBatch& x) { return histogram_imitation_loss(x, opt.spec); });
  }
  std::vector<GradcheckResult> out{kl, bkl, hist};
  if (opt.d >= 2) out.insert(out.begin() + 2, corr);
  return out;
}

}  // namespace srgan
