#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

namespace srgan {

/// Coefficients of the weighted SRGAN objective. Defaults are the full
/// hyper-parameter table (every "0 or x" entry at its non-zero value).
struct LossWeights {
  double lambda_cycle = 5.0;
  double lambda_idt = 5.0;
  double lambda_reg = 0.5;
  double lambda_idt_reg = 0.5;
  double lambda_kl = 0.1;
  double lambda_bkl = 10.0;
  double lambda_corr_enc = 100.0;
  double lambda_hist = 100.0;
  double lambda_class = 1.0;

  /// Throws Error unless every weight is finite and >= 0.
  void validate() const;

  static LossWeights defaults() { return {}; }
  /// Experiment-1 "Conventional KL Loss" column.
  static LossWeights conventional_kl();
  /// Experiment-1 "Proposed Losses" column.
  static LossWeights proposed();
  /// default | conventional_kl | proposed
  static LossWeights preset(std::string_view name);

  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// Keys are the hyper-parameter symbols: lambda_cycle, lambda_idt, lambda_reg,
/// lambda_idt_reg, lambda_KL, lambda_bKL, lambda_corr_enc, lambda_hist,
/// lambda_class. Missing keys keep their default; unknown keys throw.
LossWeights weights_from_json(const nlohmann::json& j);
nlohmann::ordered_json weights_to_json(const LossWeights& w);

}  // namespace srgan
