#include "srgan/restriction_losses.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace srgan {

namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(std::string(what) + " contains non-finite entries");
}

void accumulate(LossEval& total, double weight, const LossEval& term) {
  total.value += weight * term.value;
  total.grad += weight * term.grad;
}

}  // namespace

VaeMoments::VaeMoments(Matrix mu, Matrix logvar) : mu_(std::move(mu)), logvar_(std::move(logvar)) {
  if (mu_.rows() != logvar_.rows() || mu_.cols() != logvar_.cols()) {
    throw Error("VaeMoments: mu and logvar shapes differ");
  }
  if (mu_.size() == 0) throw Error("VaeMoments: empty moments");
  require_finite(mu_, "VaeMoments mu");
  require_finite(logvar_, "VaeMoments logvar");
}

VaeLossEval conventional_kl(const VaeMoments& m) {
  const double inv_n = 1.0 / static_cast<double>(m.mu().rows());
  const Matrix var = m.logvar().array().exp().matrix();
  VaeLossEval out;
  out.value = 0.5 * inv_n *
              (m.mu().array().square() + var.array() - m.logvar().array() - 1.0).sum();
  out.grad_mu = inv_n * m.mu();
  out.grad_logvar = (0.5 * inv_n) * (var.array() - 1.0).matrix();
  return out;
}

LossEval conventional_kl(const FeatureBatch& b) {
  const auto kl = conventional_kl(VaeMoments(b.data(), Matrix::Zero(b.data().rows(), b.data().cols())));
  return {kl.value, kl.grad_mu};
}

LossEval batch_kl(const FeatureBatch& b) {
  const auto stats = column_stats(b);
  const auto& x = b.data();
  const double inv_n = 1.0 / static_cast<double>(b.n());
  LossEval out{0.0, Matrix(x.rows(), x.cols())};
  for (Eigen::Index d = 0; d < x.cols(); ++d) {
    const double m = stats.mean[d];
    const bool floored = stats.std[d] < kStdFloor;
    const double s = floored ? kStdFloor : stats.std[d];
    const double var = s * s;
    out.value += 0.5 * (m * m + var - std::log(var) - 1.0);
    // d/dx of ½(var - ln var) is (1 - 1/var)(x - m)/N; zero once the floor is active.
    const double spread = floored ? 0.0 : (1.0 - 1.0 / var) * inv_n;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out.grad(i, d) = m * inv_n + spread * (x(i, d) - m);
    }
  }
  return out;
}

LossEval correlation_loss(const FeatureBatch& b) {
  if (b.d() < 2) throw Error("correlation_loss needs at least 2 feature dimensions");
  const auto stats = column_stats(b);
  const auto corr = corr_mat(b);
  const auto& x = b.data();
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const double dd = static_cast<double>(d * d);

  Vector s(d);
  for (Eigen::Index p = 0; p < d; ++p) s[p] = std::max(stats.std[p], kStdFloor);
  // Standardized deviations z_ip = (x_ip - m_p) / s_p.
  Matrix z(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < d; ++p) z(i, p) = (x(i, p) - stats.mean[p]) / s[p];
  }

  Matrix sign = Matrix::Zero(d, d);
  Vector abs_row_sum = Vector::Zero(d);
  double value = 0.0;
  for (Eigen::Index p = 0; p < d; ++p) {
    for (Eigen::Index q = 0; q < d; ++q) {
      if (p == q) continue;
      const double r = corr.m(p, q);
      value += std::abs(r);
      abs_row_sum[p] += std::abs(r);
      sign(p, q) = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    }
  }

  // d r_pq / d x_ip = (z_iq - [s_p not floored] r_pq z_ip) / (N s_p); the pair
  // (p, q) appears twice in the sum, hence the factor 2.
  const Matrix zs = z * sign;
  LossEval out{value / dd, Matrix(n, d)};
  for (Eigen::Index p = 0; p < d; ++p) {
    const double active = stats.std[p] < kStdFloor ? 0.0 : 1.0;
    const double scale = 2.0 / (dd * static_cast<double>(n) * s[p]);
    out.grad.col(p) = scale * (zs.col(p) - active * abs_row_sum[p] * z.col(p));
  }
  return out;
}

LossEval histogram_imitation_loss(const FeatureBatch& b, const HistogramSpec& spec) {
  const auto reference = gaussian_reference(spec);
  const auto n = static_cast<Eigen::Index>(b.n());
  const auto d = static_cast<long>(b.d());
  const double inv_d = 1.0 / static_cast<double>(d);
  std::vector<double> per_dim(static_cast<std::size_t>(d));
  LossEval out{0.0, Matrix(n, d)};

  // Columns are independent, so the result does not depend on the schedule.
#pragma omp parallel for schedule(static)
  for (long j = 0; j < d; ++j) {
    const auto column = b.column(static_cast<std::size_t>(j));
    const auto hg = soft_hist_with_grad(column, spec);
    per_dim[static_cast<std::size_t>(j)] = hist_kl(hg.hist, reference);
    Eigen::RowVectorXd dkl_dp(static_cast<Eigen::Index>(spec.bins()));
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      dkl_dp[static_cast<Eigen::Index>(k)] =
          std::log(hg.hist.freqs[k] / reference.freqs[k]) + 1.0;
    }
    out.grad.col(j) = inv_d * (dkl_dp * hg.jacobian).transpose();
  }
  for (double v : per_dim) out.value += v;
  out.value *= inv_d;
  return out;
}

LossEval combined_restriction(const FeatureBatch& b, const LossWeights& w,
                              const HistogramSpec& spec) {
  w.validate();
  LossEval out{0.0, Matrix::Zero(b.data().rows(), b.data().cols())};
  if (w.lambda_bkl > 0.0) accumulate(out, w.lambda_bkl, batch_kl(b));
  if (w.lambda_corr_enc > 0.0) accumulate(out, w.lambda_corr_enc, correlation_loss(b));
  if (w.lambda_hist > 0.0) accumulate(out, w.lambda_hist, histogram_imitation_loss(b, spec));
  return out;
}

LossEval restriction_objective(const FeatureBatch& b, const LossWeights& w,
                               const HistogramSpec& spec) {
  auto out = combined_restriction(b, w, spec);
  if (w.lambda_kl > 0.0) accumulate(out, w.lambda_kl, conventional_kl(b));
  return out;
}

}  // namespace srgan
