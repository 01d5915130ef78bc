#include "srgan/toy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "srgan/restriction_losses.hpp"

namespace srgan {

namespace {

enum Stream : std::uint64_t {
  kTrainNoise = 1,
  kHeldoutNoise = 2,
  kEncoderInit = 3,
  kPretrainBatches = 4,
  kHeadInit = 5,
  kRestrictionBatches = 6,
};

DenseLayer make_layer(std::size_t in, std::size_t out, Rng& rng) {
  DenseLayer l{Matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
               Vector::Zero(static_cast<Eigen::Index>(out))};
  const double scale = 1.0 / std::sqrt(static_cast<double>(in));
  for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = scale * rng.normal();
  }
  return l;
}

Matrix affine(const DenseLayer& l, const Matrix& x) {
  Matrix y = x * l.weight.transpose();
  y.rowwise() += l.bias.transpose();
  return y;
}

struct ForwardCache {
  Matrix h1;
  Matrix h2;
  Matrix out;
};

ForwardCache forward_cached(const MlpEncoder& enc, const Matrix& x) {
  ForwardCache c;
  c.h1 = affine(enc.trunk_in, x).array().tanh().matrix();
  c.h2 = affine(enc.trunk_hidden, c.h1).array().tanh().matrix();
  c.out = affine(enc.head, c.h2);
  return c;
}

// One gradient-descent step given d loss / d output. Trunk layers are left
// untouched when frozen.
void backward_step(MlpEncoder& enc, const Matrix& x, const ForwardCache& c, const Matrix& d_out,
                   double step, bool freeze_trunk) {
  const Matrix d_head_w = d_out.transpose() * c.h2;
  const Vector d_head_b = d_out.colwise().sum().transpose();
  if (!freeze_trunk) {
    const Matrix d_a2 = ((d_out * enc.head.weight).array() * (1.0 - c.h2.array().square())).matrix();
    const Matrix d_w2 = d_a2.transpose() * c.h1;
    const Vector d_b2 = d_a2.colwise().sum().transpose();
    const Matrix d_a1 =
        ((d_a2 * enc.trunk_hidden.weight).array() * (1.0 - c.h1.array().square())).matrix();
    const Matrix d_w1 = d_a1.transpose() * x;
    const Vector d_b1 = d_a1.colwise().sum().transpose();
    enc.trunk_in.weight -= step * d_w1;
    enc.trunk_in.bias -= step * d_b1;
    enc.trunk_hidden.weight -= step * d_w2;
    enc.trunk_hidden.bias -= step * d_b2;
  }
  enc.head.weight -= step * d_head_w;
  enc.head.bias -= step * d_head_b;
}

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& idx, std::size_t begin,
                   std::size_t count) {
  Matrix out(static_cast<Eigen::Index>(count), x.cols());
  for (std::size_t r = 0; r < count; ++r) {
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[begin + r]));
  }
  return out;
}

// Epoch-wise shuffled mini-batches; a trailing partial batch is dropped.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t batch, Rng rng)
      : order_(n), batch_(std::min(batch, n)), rng_(std::move(rng)) {
    for (std::size_t i = 0; i < n; ++i) order_[i] = i;
    cursor_ = n;  // forces a shuffle on first use
  }

  std::size_t next() {
    if (cursor_ + batch_ > order_.size()) {
      rng_.shuffle(order_);
      cursor_ = 0;
    }
    const std::size_t begin = cursor_;
    cursor_ += batch_;
    return begin;
  }

  const std::vector<std::size_t>& order() const { return order_; }
  std::size_t batch() const { return batch_; }

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

void fnv1a(std::uint64_t& h, const double* data, Eigen::Index count) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < static_cast<std::size_t>(count) * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
}

double softmax_cross_entropy(const Matrix& logits, const std::vector<std::size_t>& labels,
                             const std::vector<std::size_t>& idx, std::size_t begin,
                             Matrix& d_logits) {
  const Eigen::Index b = logits.rows();
  d_logits.resize(b, logits.cols());
  double loss = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) {
    const double mx = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(r).array() - mx).exp().matrix();
    const double z = e.sum();
    const std::size_t y = labels[idx[begin + static_cast<std::size_t>(r)]];
    loss += -(logits(r, static_cast<Eigen::Index>(y)) - mx - std::log(z));
    d_logits.row(r) = e / z;
    d_logits(r, static_cast<Eigen::Index>(y)) -= 1.0;
  }
  d_logits /= static_cast<double>(b);
  return loss / static_cast<double>(b);
}

std::size_t argmax_row(const Matrix& m, Eigen::Index r) {
  Eigen::Index best = 0;
  m.row(r).maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

}  // namespace

SyntheticDataset gen_clusters(std::size_t n_per_class, std::size_t p, std::size_t c,
                              double spread, std::uint64_t seed, std::uint64_t stream) {
  if (p == 0 || c == 0) throw Error("gen_clusters needs positive sizes");
  if (n_per_class < 2) throw Error("gen_clusters needs at least 2 samples per class");
  if (c > p) throw Error("gen_clusters needs classes <= input dimension");
  if (!std::isfinite(spread) || !(spread > 0.0)) throw Error("gen_clusters needs spread > 0");

  SyntheticDataset ds;
  ds.classes = c;
  ds.spread = spread;
  ds.seed = seed;
  // Vertices e_0..e_{c-1}, centred and scaled so neighbours sit 10·spread apart.
  const double scale = 10.0 * spread / std::sqrt(2.0);
  ds.centers = Matrix::Zero(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t j = 0; j < c; ++j) {
      ds.centers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) =
          scale * ((k == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(c));
    }
  }

  Rng rng(seed, stream);
  const std::size_t n = n_per_class * c;
  ds.inputs.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i / n_per_class;
    ds.labels[i] = k;
    for (std::size_t j = 0; j < p; ++j) {
      ds.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ds.centers(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) +
          spread * rng.normal();
    }
  }
  return ds;
}

Matrix class_centroids(const Matrix& x, const std::vector<std::size_t>& labels,
                       std::size_t classes) {
  if (labels.size() != static_cast<std::size_t>(x.rows())) {
    throw Error("class_centroids: label count does not match rows");
  }
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(classes), x.cols());
  std::vector<double> count(classes, 0.0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const std::size_t k = labels[static_cast<std::size_t>(i)];
    if (k >= classes) throw Error("class_centroids: label out of range");
    c.row(static_cast<Eigen::Index>(k)) += x.row(i);
    count[k] += 1.0;
  }
  for (std::size_t k = 0; k < classes; ++k) {
    if (count[k] == 0.0) throw Error("class_centroids: class " + std::to_string(k) + " is empty");
    c.row(static_cast<Eigen::Index>(k)) /= count[k];
  }
  return c;
}

double nearest_centroid_accuracy(const Matrix& centroids, const Matrix& x,
                                 const std::vector<std::size_t>& labels) {
  if (labels.size() != static_cast<std::size_t>(x.rows()) || centroids.cols() != x.cols()) {
    throw Error("nearest_centroid_accuracy: shape mismatch");
  }
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < centroids.rows(); ++k) {
      const double d = (x.row(i) - centroids.row(k)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (static_cast<std::size_t>(best) == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(x.rows());
}

MlpEncoder MlpEncoder::create(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                              Rng& rng) {
  if (inputs == 0 || hidden == 0 || outputs == 0) throw Error("encoder sizes must be positive");
  MlpEncoder enc;
  enc.trunk_in = make_layer(inputs, hidden, rng);
  enc.trunk_hidden = make_layer(hidden, hidden, rng);
  enc.head = make_layer(hidden, outputs, rng);
  return enc;
}

void MlpEncoder::replace_head(std::size_t outputs, Rng& rng) {
  if (outputs == 0) throw Error("encoder head needs at least one output");
  head = make_layer(static_cast<std::size_t>(trunk_hidden.weight.rows()), outputs, rng);
}

Matrix MlpEncoder::trunk(const Matrix& x) const {
  return forward_cached(*this, x).h2;
}

Matrix MlpEncoder::forward(const Matrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != input_dim()) {
    throw Error("encoder expects " + std::to_string(input_dim()) + " inputs, got " +
                std::to_string(x.cols()));
  }
  return forward_cached(*this, x).out;
}

std::uint64_t MlpEncoder::trunk_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  fnv1a(h, trunk_in.weight.data(), trunk_in.weight.size());
  fnv1a(h, trunk_in.bias.data(), trunk_in.bias.size());
  fnv1a(h, trunk_hidden.weight.data(), trunk_hidden.weight.size());
  fnv1a(h, trunk_hidden.bias.data(), trunk_hidden.bias.size());
  return h;
}

std::string_view to_string(Condition c) {
  return c == Condition::conventional_kl ? "conventional_kl" : "proposed";
}

Condition condition_from_string(std::string_view s) {
  if (s == "conventional_kl") return Condition::conventional_kl;
  if (s == "proposed") return Condition::proposed;
  throw Error("unknown condition '" + std::string(s) + "' (expected conventional_kl or proposed)");
}

TrainConfig TrainConfig::for_condition(Condition c, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.condition = c;
  cfg.seed = seed;
  cfg.batch = 128;
  if (c == Condition::conventional_kl) {
    cfg.weights = LossWeights::conventional_kl();
    cfg.steps = 2000;
    cfg.step_size = 0.5;
  } else {
    // The histogram term dominates the gradient scale; larger steps diverge.
    cfg.weights = LossWeights::proposed();
    cfg.steps = 6000;
    cfg.step_size = 0.001;
  }
  return cfg;
}

TrainConfig TrainConfig::classifier(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.steps = 200;
  cfg.step_size = 0.1;
  cfg.batch = 128;
  return cfg;
}

void TrainConfig::validate() const {
  if (steps == 0) throw Error("train config needs steps >= 1");
  if (!std::isfinite(step_size) || step_size < 0.0) {
    throw Error("train config needs a finite step size >= 0");
  }
  if (batch < 2) throw Error("train config needs batch >= 2");
  weights.validate();
}

PretrainResult pretrain_classifier(const SyntheticDataset& train, const SyntheticDataset& heldout,
                                   MlpEncoder enc, const TrainConfig& cfg) {
  cfg.validate();
  if (enc.output_dim() != train.classes) {
    throw Error("pretrain_classifier: head width " + std::to_string(enc.output_dim()) +
                " does not match " + std::to_string(train.classes) + " classes");
  }
  BatchSampler sampler(static_cast<std::size_t>(train.inputs.rows()), cfg.batch,
                       Rng(cfg.seed, kPretrainBatches));
  PretrainResult result;
  result.loss_trace.reserve(cfg.steps);
  Matrix d_logits;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const std::size_t begin = sampler.next();
    const Matrix x = gather_rows(train.inputs, sampler.order(), begin, sampler.batch());
    const auto cache = forward_cached(enc, x);
    const double loss = softmax_cross_entropy(cache.out, train.labels, sampler.order(), begin, d_logits);
    if (!std::isfinite(loss)) {
      throw Error("pretrain_classifier diverged at step " + std::to_string(step));
    }
    result.loss_trace.push_back(loss);
    backward_step(enc, x, cache, d_logits, cfg.step_size, false);
  }

  const Matrix logits = enc.forward(heldout.inputs);
  std::size_t correct = 0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    if (argmax_row(logits, r) == heldout.labels[static_cast<std::size_t>(r)]) ++correct;
  }
  result.accuracy = static_cast<double>(correct) / static_cast<double>(logits.rows());
  result.encoder = std::move(enc);
  return result;
}

HeadTrainResult train_restriction_head(const SyntheticDataset& train,
                                       const SyntheticDataset& heldout, MlpEncoder enc,
                                       const TrainConfig& cfg, bool freeze_trunk,
                                       const HistogramSpec& spec) {
  cfg.validate();
  ExperimentReport report;
  report.condition = std::string(to_string(cfg.condition));
  report.seed = cfg.seed;
  report.trunk_frozen = freeze_trunk;
  report.spec = spec;
  report.weights = cfg.weights;
  report.steps = cfg.steps;
  report.step_size = cfg.step_size;
  report.batch = cfg.batch;
  report.trunk_checksum_before = enc.trunk_checksum();

  BatchSampler sampler(static_cast<std::size_t>(train.inputs.rows()), cfg.batch,
                       Rng(cfg.seed, kRestrictionBatches));
  report.loss_trace.reserve(cfg.steps);
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const std::size_t begin = sampler.next();
    const Matrix x = gather_rows(train.inputs, sampler.order(), begin, sampler.batch());
    const auto cache = forward_cached(enc, x);
    if (!cache.out.allFinite()) {
      throw Error("train_restriction_head: non-finite features at step " + std::to_string(step));
    }
    const auto loss = restriction_objective(FeatureBatch(cache.out), cfg.weights, spec);
    if (!std::isfinite(loss.value) || !loss.grad.allFinite()) {
      throw Error("train_restriction_head: non-finite loss at step " + std::to_string(step));
    }
    report.loss_trace.push_back(loss.value);
    backward_step(enc, x, cache, loss.grad, cfg.step_size, freeze_trunk);
  }
  report.trunk_checksum_after = enc.trunk_checksum();

  const FeatureBatch eval(enc.forward(heldout.inputs));
  report.eval_samples = eval.n();
  report.stats = column_stats(eval);
  report.corr = corr_mat(eval);
  report.corr_offdiag_mean = eval.d() >= 2 ? correlation_loss(eval).value : 0.0;
  report.reference = gaussian_reference(spec);
  for (std::size_t j = 0; j < eval.d(); ++j) {
    auto h = soft_hist(eval.column(j), spec);
    report.hist_kl.push_back(hist_kl(h, report.reference));
    report.histograms.push_back(std::move(h));
  }
  for (double v : report.hist_kl) report.mean_hist_kl += v;
  report.mean_hist_kl /= static_cast<double>(eval.d());

  const Matrix centroids = class_centroids(enc.forward(train.inputs), train.labels, train.classes);
  report.centroid_accuracy = nearest_centroid_accuracy(centroids, eval.data(), heldout.labels);
  return {std::move(enc), std::move(report)};
}

ExperimentReport run_experiment(const TrainConfig& cfg, bool with_pretraining,
                                const LabSettings& lab) {
  cfg.validate();
  const auto train = gen_clusters(lab.n_per_class, lab.input_dim, lab.classes, lab.spread,
                                  cfg.seed, kTrainNoise);
  const auto heldout = gen_clusters(lab.heldout_per_class, lab.input_dim, lab.classes,
                                    lab.spread, cfg.seed, kHeldoutNoise);
  Rng init(cfg.seed, kEncoderInit);
  Rng head_init(cfg.seed, kHeadInit);

  if (!with_pretraining) {
    auto enc = MlpEncoder::create(lab.input_dim, lab.hidden_dim, lab.feature_dim, init);
    return train_restriction_head(train, heldout, std::move(enc), cfg, false, lab.spec).report;
  }

  auto classifier = MlpEncoder::create(lab.input_dim, lab.hidden_dim, lab.classes, init);
  auto pre = pretrain_classifier(train, heldout, std::move(classifier),
                                 TrainConfig::classifier(cfg.seed));
  pre.encoder.replace_head(lab.feature_dim, head_init);
  auto result = train_restriction_head(train, heldout, std::move(pre.encoder), cfg, true, lab.spec);
  result.report.pretrained = true;
  result.report.classifier_accuracy = pre.accuracy;
  return std::move(result.report);
}

}  // namespace srgan
