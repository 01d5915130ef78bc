#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "srgan/loss_weights.hpp"

namespace srgan {

/// Class indicator over the domain classes; entries >= 0 summing to 1.
class DomainCode {
 public:
  explicit DomainCode(std::vector<double> weights);
  static DomainCode one_hot(std::size_t cls, std::size_t classes);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// Style / latent code fed to the generator or recovered by the encoder.
class StyleCode {
 public:
  explicit StyleCode(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

struct DiscriminatorOutputs {
  /// Patch scores; any positive length.
  std::vector<double> realness;
  /// Auxiliary classifier outputs, only used by the single-discriminator form.
  std::vector<double> class_logits;
};

/// Regression targets of the least-squares adversarial loss.
struct AdversarialTargets {
  double real = 1.0;
  double fake = 0.0;
};

struct AdversarialLoss {
  double discriminator = 0.0;
  double generator = 0.0;
};

/// Least-squares adversarial loss for one discriminator. Callers sum over
/// class pairs themselves when several discriminators are in play.
AdversarialLoss lsgan_adv(const DiscriminatorOutputs& real, const DiscriminatorOutputs& fake,
                          const AdversarialTargets& targets = {});

/// Mean absolute difference; used for the cycle and identity terms.
double l1_loss(std::span<const double> a, std::span<const double> b);

/// Mean absolute difference between the sampled and the re-encoded style
/// code. Serves both the regression and the identity-regression terms.
double regression_loss(const StyleCode& c, const StyleCode& c_hat);

/// ½·mean((class_logits - z)²).
double class_loss(const DiscriminatorOutputs& out, const DomainCode& z);

/// Pre-summed loss terms of the full objective.
struct LossComponents {
  double adv = 0.0;
  double cycle = 0.0;
  double idt = 0.0;
  double reg = 0.0;
  double idt_reg = 0.0;
  double cls = 0.0;
  double kl = 0.0;
  double bkl = 0.0;
  double corr_enc = 0.0;
  double hist = 0.0;
};

/// L_adv + Σ λ_t·L_t over the remaining terms (λ_class included).
double total_loss(const LossComponents& c, const LossWeights& w);

/// Keys: L_adv, L_cycle, L_idt, L_reg, L_idt_reg, L_class, L_KL, L_bKL,
/// L_corr_enc, L_hist. Missing keys are 0; unknown keys throw.
LossComponents components_from_json(const nlohmann::json& j);

}  // namespace srgan
