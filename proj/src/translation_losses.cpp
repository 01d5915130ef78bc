#include "srgan/translation_losses.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "srgan/numeric_core.hpp"

namespace srgan {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(std::string(what) + " contains non-finite values");
  }
}

double mean_squared_offset(std::span<const double> v, double target) {
  double sum = 0.0;
  for (double x : v) sum += (x - target) * (x - target);
  return sum / static_cast<double>(v.size());
}

double mean_abs_diff(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(std::string(what) + ": size mismatch (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw Error(std::string(what) + ": empty input");
  require_finite(a, what);
  require_finite(b, what);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

constexpr std::pair<const char*, double LossComponents::*> kComponentKeys[] = {
    {"L_adv", &LossComponents::adv},         {"L_cycle", &LossComponents::cycle},
    {"L_idt", &LossComponents::idt},         {"L_reg", &LossComponents::reg},
    {"L_idt_reg", &LossComponents::idt_reg}, {"L_class", &LossComponents::cls},
    {"L_KL", &LossComponents::kl},           {"L_bKL", &LossComponents::bkl},
    {"L_corr_enc", &LossComponents::corr_enc}, {"L_hist", &LossComponents::hist},
};

}  // namespace

DomainCode::DomainCode(std::vector<double> weights) : values_(std::move(weights)) {
  if (values_.empty()) throw Error("domain code must not be empty");
  double sum = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw Error("domain code entries must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("domain code entries must sum to 1");
}

DomainCode DomainCode::one_hot(std::size_t cls, std::size_t classes) {
  if (cls >= classes) throw Error("domain class index out of range");
  std::vector<double> v(classes, 0.0);
  v[cls] = 1.0;
  return DomainCode(std::move(v));
}

StyleCode::StyleCode(std::vector<double> values) : values_(std::move(values)) {
  require_finite(values_, "style code");
}

AdversarialLoss lsgan_adv(const DiscriminatorOutputs& real, const DiscriminatorOutputs& fake,
                          const AdversarialTargets& targets) {
  if (real.realness.empty() || fake.realness.empty()) {
    throw Error("lsgan_adv: discriminator score vectors must be non-empty");
  }
  require_finite(real.realness, "lsgan_adv real scores");
  require_finite(fake.realness, "lsgan_adv fake scores");
  AdversarialLoss out;
  out.discriminator = 0.5 * mean_squared_offset(real.realness, targets.real) +
                      0.5 * mean_squared_offset(fake.realness, targets.fake);
  out.generator = 0.5 * mean_squared_offset(fake.realness, targets.real);
  return out;
}

double l1_loss(std::span<const double> a, std::span<const double> b) {
  return mean_abs_diff(a, b, "l1_loss");
}

double regression_loss(const StyleCode& c, const StyleCode& c_hat) {
  return mean_abs_diff(c.values(), c_hat.values(), "regression_loss");
}

double class_loss(const DiscriminatorOutputs& out, const DomainCode& z) {
  if (out.class_logits.size() != z.size()) {
    throw Error("class_loss: " + std::to_string(out.class_logits.size()) +
                " class outputs for a " + std::to_string(z.size()) + "-class domain code");
  }
  require_finite(out.class_logits, "class_loss outputs");
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double e = out.class_logits[i] - z.values()[i];
    sum += e * e;
  }
  return 0.5 * sum / static_cast<double>(z.size());
}

double total_loss(const LossComponents& c, const LossWeights& w) {
  w.validate();
  for (const auto& [name, field] : kComponentKeys) {
    if (!std::isfinite(c.*field)) throw Error(std::string("loss component ") + name + " is not finite");
  }
  return c.adv + w.lambda_cycle * c.cycle + w.lambda_idt * c.idt + w.lambda_reg * c.reg +
         w.lambda_idt_reg * c.idt_reg + w.lambda_class * c.cls + w.lambda_kl * c.kl +
         w.lambda_bkl * c.bkl + w.lambda_corr_enc * c.corr_enc + w.lambda_hist * c.hist;
}

LossComponents components_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("loss components must be a JSON object");
  LossComponents c;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, field] : kComponentKeys) {
      if (key == name) {
        if (!value.is_number()) throw Error("component " + key + " must be a number");
        c.*field = value.get<double>();
        known = true;
        break;
      }
    }
    if (!known) throw Error("unknown loss component '" + key + "'");
  }
  return c;
}

}  // namespace srgan
