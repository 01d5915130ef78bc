#include "srgan/loss_weights.hpp"

#include <cmath>
#include <utility>

#include "srgan/numeric_core.hpp"

namespace srgan {

namespace {

// Symbol names as they appear in the hyper-parameter table.
constexpr std::pair<const char*, double LossWeights::*> kFields[] = {
    {"lambda_cycle", &LossWeights::lambda_cycle},
    {"lambda_idt", &LossWeights::lambda_idt},
    {"lambda_reg", &LossWeights::lambda_reg},
    {"lambda_idt_reg", &LossWeights::lambda_idt_reg},
    {"lambda_KL", &LossWeights::lambda_kl},
    {"lambda_bKL", &LossWeights::lambda_bkl},
    {"lambda_corr_enc", &LossWeights::lambda_corr_enc},
    {"lambda_hist", &LossWeights::lambda_hist},
    {"lambda_class", &LossWeights::lambda_class},
};

}  // namespace

void LossWeights::validate() const {
  for (const auto& [name, field] : kFields) {
    const double v = this->*field;
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(std::string("loss weight ") + name + " must be finite and >= 0");
    }
  }
}

LossWeights LossWeights::conventional_kl() {
  LossWeights w;
  w.lambda_idt_reg = 0.0;
  w.lambda_kl = 0.1;
  w.lambda_bkl = 0.0;
  w.lambda_corr_enc = 0.0;
  w.lambda_hist = 0.0;
  return w;
}

LossWeights LossWeights::proposed() {
  LossWeights w;
  w.lambda_idt_reg = 0.0;
  w.lambda_kl = 0.0;
  w.lambda_bkl = 10.0;
  w.lambda_corr_enc = 100.0;
  w.lambda_hist = 100.0;
  return w;
}

LossWeights LossWeights::preset(std::string_view name) {
  if (name == "default") return defaults();
  if (name == "conventional_kl") return conventional_kl();
  if (name == "proposed") return proposed();
  throw Error("unknown weight preset '" + std::string(name) +
              "' (expected default, conventional_kl or proposed)");
}

LossWeights weights_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("weights config must be a JSON object");
  LossWeights w;
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const auto& [name, field] : kFields) {
      if (key == name) {
        if (!value.is_number()) throw Error("weight " + key + " must be a number");
        w.*field = value.get<double>();
        known = true;
        break;
      }
    }
    if (!known) throw Error("unknown weight key '" + key + "'");
  }
  w.validate();
  return w;
}

nlohmann::ordered_json weights_to_json(const LossWeights& w) {
  nlohmann::ordered_json j;
  for (const auto& [name, field] : kFields) j[name] = w.*field;
  return j;
}

}  // namespace srgan
