#pragma once

#include "srgan/loss_weights.hpp"
#include "srgan/numeric_core.hpp"
#include "srgan/soft_histogram.hpp"

namespace srgan {

/// A loss value with its gradient with respect to the input batch.
struct LossEval {
  double value = 0.0;
  Matrix grad;
};

/// Per-sample Gaussian posterior parameters of a VAE-style encoder.
class VaeMoments {
 public:
  VaeMoments(Matrix mu, Matrix logvar);

  const Matrix& mu() const { return mu_; }
  const Matrix& logvar() const { return logvar_; }

 private:
  Matrix mu_;
  Matrix logvar_;
};

struct VaeLossEval {
  double value = 0.0;
  Matrix grad_mu;
  Matrix grad_logvar;
};

/// Per-sample KL(N(mu, exp(logvar)) || N(0, I)), averaged over samples.
VaeLossEval conventional_kl(const VaeMoments& m);

/// conventional_kl with the batch taken as mu and logvar fixed at 0.
LossEval conventional_kl(const FeatureBatch& b);

/// KL between the Gaussian with the batch's per-column mean and population
/// std, and N(0, I). Stds are floored at kStdFloor.
LossEval batch_kl(const FeatureBatch& b);

/// mean over all D² entries of |corr_mat(b) - I|. Requires D >= 2.
///
/// The gradient uses sign(0) = 0, so it is a subgradient at |r| = 0.
LossEval correlation_loss(const FeatureBatch& b);

/// Mean over columns of KL(soft_hist(column) || gaussian_reference).
LossEval histogram_imitation_loss(const FeatureBatch& b, const HistogramSpec& spec = {});

/// λ_bKL·batch_kl + λ_corr_enc·correlation_loss + λ_hist·histogram_imitation_loss.
/// Terms with a zero weight are skipped entirely.
LossEval combined_restriction(const FeatureBatch& b, const LossWeights& w,
                              const HistogramSpec& spec = {});

/// combined_restriction plus λ_KL·conventional_kl(b): every encoder-side
/// term of the full objective.
LossEval restriction_objective(const FeatureBatch& b, const LossWeights& w,
                               const HistogramSpec& spec = {});

}  // namespace srgan
