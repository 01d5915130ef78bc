#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srgan/loss_weights.hpp"
#include "srgan/numeric_core.hpp"
#include "srgan/soft_histogram.hpp"

namespace srgan {

/// Labelled Gaussian clusters standing in for the class-conditioned images.
struct SyntheticDataset {
  Matrix inputs;                    // N x P
  std::vector<std::size_t> labels;  // N, values in [0, classes)
  std::size_t classes = 0;
  Matrix centers;                   // classes x P
  double spread = 0.0;
  std::uint64_t seed = 0;
};

/// `c` isotropic clusters with std `spread` around scaled simplex vertices
/// in R^p (pairwise center distance 10·spread). Needs c <= p. Samples are
/// grouped by class. `stream` selects the noise stream, so a held-out set
/// with the same centers is gen_clusters(..., seed, other_stream).
SyntheticDataset gen_clusters(std::size_t n_per_class, std::size_t p, std::size_t c,
                              double spread, std::uint64_t seed, std::uint64_t stream = 1);

/// Fraction of rows whose nearest class centroid (Euclidean) is their label.
double nearest_centroid_accuracy(const Matrix& centroids, const Matrix& x,
                                 const std::vector<std::size_t>& labels);

/// Per-class means of the rows of x.
Matrix class_centroids(const Matrix& x, const std::vector<std::size_t>& labels,
                       std::size_t classes);

struct DenseLayer {
  Matrix weight;  // out x in
  Vector bias;    // out
};

/// Two tanh trunk layers (P -> H -> H) followed by a linear head (H -> out).
struct MlpEncoder {
  DenseLayer trunk_in;
  DenseLayer trunk_hidden;
  DenseLayer head;

  static MlpEncoder create(std::size_t inputs, std::size_t hidden, std::size_t outputs, Rng& rng);

  /// Swaps in a freshly initialised H -> outputs head; the trunk is kept.
  void replace_head(std::size_t outputs, Rng& rng);

  Matrix trunk(const Matrix& x) const;
  Matrix forward(const Matrix& x) const;

  std::size_t input_dim() const { return static_cast<std::size_t>(trunk_in.weight.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(head.weight.rows()); }

  /// FNV-1a over the raw bytes of the trunk parameters.
  std::uint64_t trunk_checksum() const;
};

enum class Condition { conventional_kl, proposed };

std::string_view to_string(Condition c);
Condition condition_from_string(std::string_view s);

struct TrainConfig {
  Condition condition = Condition::proposed;
  LossWeights weights = LossWeights::proposed();
  std::size_t steps = 6000;
  /// Plain gradient-descent step; 0 is allowed and leaves parameters untouched.
  double step_size = 0.001;
  std::size_t batch = 128;
  std::uint64_t seed = 0;

  /// Tested defaults for a restriction condition.
  static TrainConfig for_condition(Condition c, std::uint64_t seed = 0);
  /// Tested defaults for the classifier-pretraining stage.
  static TrainConfig classifier(std::uint64_t seed = 0);

  void validate() const;
};

struct PretrainResult {
  MlpEncoder encoder;
  double accuracy = 0.0;
  std::vector<double> loss_trace;
};

/// Softmax cross-entropy training of `enc` (head width = number of classes),
/// evaluated on `heldout`.
PretrainResult pretrain_classifier(const SyntheticDataset& train, const SyntheticDataset& heldout,
                                   MlpEncoder enc, const TrainConfig& cfg);

struct ExperimentReport {
  std::string condition;
  std::uint64_t seed = 0;
  bool pretrained = false;
  bool trunk_frozen = false;
  std::size_t eval_samples = 0;
  ColumnStats stats;
  CorrMatrix corr;
  /// mean |CorrMat - I| over all D² entries.
  double corr_offdiag_mean = 0.0;
  std::vector<SoftHistogram> histograms;
  SoftHistogram reference;
  std::vector<double> hist_kl;
  double mean_hist_kl = 0.0;
  std::vector<double> loss_trace;
  std::optional<double> classifier_accuracy;
  /// Nearest-centroid accuracy of the encoded held-out set, centroids from
  /// the encoded training set.
  double centroid_accuracy = 0.0;
  std::uint64_t trunk_checksum_before = 0;
  std::uint64_t trunk_checksum_after = 0;
  HistogramSpec spec;
  LossWeights weights;
  std::size_t steps = 0;
  double step_size = 0.0;
  std::size_t batch = 0;
};

struct HeadTrainResult {
  MlpEncoder encoder;
  ExperimentReport report;
};

/// Gradient descent on the restriction objective selected by cfg, through
/// the whole encoder or (freeze_trunk) through the head only. The report is
/// computed on `heldout`.
HeadTrainResult train_restriction_head(const SyntheticDataset& train,
                                       const SyntheticDataset& heldout, MlpEncoder enc,
                                       const TrainConfig& cfg, bool freeze_trunk,
                                       const HistogramSpec& spec = {});

/// Dataset and architecture shared by every stage of an experiment.
struct LabSettings {
  std::size_t n_per_class = 256;
  std::size_t heldout_per_class = 256;
  std::size_t input_dim = 16;
  std::size_t hidden_dim = 32;
  std::size_t classes = 4;
  std::size_t feature_dim = 8;
  double spread = 0.5;
  HistogramSpec spec;
};

/// gen_clusters -> (pretrain_classifier, replace head, freeze trunk) ->
/// train_restriction_head. Everything derives from cfg.seed.
ExperimentReport run_experiment(const TrainConfig& cfg, bool with_pretraining,
                                const LabSettings& lab = {});

}  // namespace srgan
