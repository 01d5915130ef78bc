// srgan: command-line front end for the restriction losses, PRDC scoring and
// the toy lab.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "srgan/feature_io.hpp"
#include "srgan/gradcheck.hpp"
#include "srgan/prdc.hpp"
#include "srgan/report.hpp"
#include "srgan/restriction_losses.hpp"
#include "srgan/toy_lab.hpp"
#include "srgan/translation_losses.hpp"

namespace {

using namespace srgan;
using ojson = nlohmann::ordered_json;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

bool looks_like_file(const std::string& s) {
  return s.find('/') != std::string::npos || s.find('.') != std::string::npos;
}

LossWeights resolve_weights(const std::string& arg) {
  return looks_like_file(arg) ? weights_from_json(read_json_file(arg)) : LossWeights::preset(arg);
}

HistogramSpec resolve_spec(const std::string& arg) {
  if (arg == "default") return {};
  const auto j = read_json_file(arg);
  try {
    return HistogramSpec(j.at("max").get<double>(), j.at("min").get<double>(),
                         j.at("bins").get<std::size_t>(), j.at("sigma").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(arg + ": " + e.what());
  }
}

FeatureFormat resolve_format(const std::string& global, const std::string& path) {
  return global.empty() ? format_from_path(path) : format_from_string(global);
}

void print_json(const ojson& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style-restriction losses, PRDC metrics and the toy collapse lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string format;
  app.add_option("--format", format, "Feature file format (csv|fbv); default from extension")
      ->check(CLI::IsMember({"csv", "fbv"}));

  // losses eval / losses total
  auto* losses = app.add_subcommand("losses", "Evaluate loss terms");
  losses->require_subcommand(1);
  losses->fallthrough();

  auto* eval = losses->add_subcommand("eval", "Restriction losses of a feature batch");
  eval->fallthrough();
  std::string eval_input;
  std::string eval_spec = "default";
  std::string eval_weights = "default";
  bool eval_header = false;
  eval->add_option("--input", eval_input, "Feature file (N x D)")->required();
  eval->add_option("--spec", eval_spec, "Histogram spec: 'default' or a JSON file");
  eval->add_option("--weights", eval_weights,
                   "Weight preset (default|conventional_kl|proposed) or a JSON file");
  eval->add_flag("--header", eval_header, "CSV input has a header line");

  auto* total = losses->add_subcommand("total", "Weighted total of pre-computed loss terms");
  std::string components_path;
  std::string total_weights = "default";
  total->add_option("--components", components_path, "JSON object of L_* terms")->required();
  total->add_option("--weights", total_weights, "Weight preset or JSON file");

  // prdc
  auto* prdc = app.add_subcommand("prdc", "Precision / recall / density / coverage");
  prdc->fallthrough();
  std::string real_path;
  std::string fake_path;
  std::size_t prdc_k = 5;
  std::string prdc_out;
  bool prdc_header = false;
  prdc->add_option("--real", real_path, "Real feature file")->required();
  prdc->add_option("--fake", fake_path, "Fake feature file")->required();
  prdc->add_option("--k", prdc_k, "Neighbour rank of the kNN balls")->check(CLI::PositiveNumber);
  prdc->add_option("--out", prdc_out, "Write scores JSON here (default: stdout)");
  prdc->add_flag("--header", prdc_header, "CSV inputs have a header line");

  // train-toy
  auto* toy = app.add_subcommand("train-toy", "Run one toy-lab experiment");
  std::string condition = "proposed";
  bool pretrain = false;
  std::uint64_t toy_seed = 0;
  std::string toy_out;
  std::optional<std::size_t> toy_steps;
  std::optional<double> toy_step_size;
  toy->add_option("--condition", condition, "conventional_kl | proposed")
      ->check(CLI::IsMember({"conventional_kl", "proposed"}));
  toy->add_flag("--pretrain", pretrain, "Pretrain the trunk as a classifier and freeze it");
  toy->add_option("--seed", toy_seed, "Seed for every random stream");
  toy->add_option("--out", toy_out, "Report directory")->required();
  toy->add_option("--steps", toy_steps, "Restriction training steps");
  toy->add_option("--step-size", toy_step_size, "Gradient-descent step size");

  // gradcheck
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of every restriction loss");
  GradcheckOptions grad_opt;
  grad->add_option("--seed", grad_opt.seed, "Seed of the first batch");
  grad->add_option("--batches", grad_opt.batches, "Number of seeded batches");
  grad->add_option("--n", grad_opt.n, "Samples per batch")->check(CLI::Range(2, 1 << 20));
  grad->add_option("--d", grad_opt.d, "Feature dimension")->check(CLI::PositiveNumber);

  // report
  auto* report = app.add_subcommand("report", "Re-render a saved report.json or scores.json");
  std::string report_in;
  std::string report_out;
  report->add_option("--in", report_in, "report.json or scores.json")->required();
  report->add_option("--out", report_out, "Output directory")->required();

  std::string command = "srgan";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << ojson{{"error", e.what()}, {"kind", "usage"}}.dump() << '\n';
    return 2;
  }

  try {
    if (eval->parsed()) {
      command = "losses eval";
      const auto batch = load_features(eval_input, resolve_format(format, eval_input), eval_header);
      const auto spec = resolve_spec(eval_spec);
      const auto weights = resolve_weights(eval_weights);
      ojson out;
      out["kl"] = conventional_kl(batch).value;
      out["bkl"] = batch_kl(batch).value;
      out["corr"] = correlation_loss(batch).value;
      out["hist"] = histogram_imitation_loss(batch, spec).value;
      out["combined"] = combined_restriction(batch, weights, spec).value;
      print_json(out);
    } else if (total->parsed()) {
      command = "losses total";
      const auto c = components_from_json(read_json_file(components_path));
      print_json(ojson{{"total", total_loss(c, resolve_weights(total_weights))}});
    } else if (prdc->parsed()) {
      command = "prdc";
      const auto real = load_features(real_path, resolve_format(format, real_path), prdc_header);
      const auto fake = load_features(fake_path, resolve_format(format, fake_path), prdc_header);
      const auto scores = scores_to_json(compute_prdc(real, fake, PrdcConfig{prdc_k}));
      if (prdc_out.empty()) {
        print_json(scores);
      } else {
        write_text_file(prdc_out, scores.dump(2) + "\n");
      }
    } else if (toy->parsed()) {
      command = "train-toy";
      auto cfg = TrainConfig::for_condition(condition_from_string(condition), toy_seed);
      if (toy_steps) cfg.steps = *toy_steps;
      if (toy_step_size) cfg.step_size = *toy_step_size;
      const auto r = run_experiment(cfg, pretrain);
      const auto bundle = emit_report(r, toy_out);
      print_json(bundle.summary);
    } else if (grad->parsed()) {
      command = "gradcheck";
      ojson out = ojson::object();
      bool ok = true;
      for (const auto& r : run_gradcheck(grad_opt)) {
        out[r.loss] = {{"max_rel_error", r.max_rel_error},
                       {"tolerance", r.tolerance},
                       {"batches", r.batches_checked},
                       {"skipped", r.batches_skipped},
                       {"passed", r.passed()}};
        ok = ok && r.passed();
      }
      print_json(out);
      if (!ok) {
        std::cerr << ojson{{"error", "gradient check failed"}, {"command", command}}.dump() << '\n';
        return 1;
      }
    } else if (report->parsed()) {
      command = "report";
      const auto j = read_json_file(report_in);
      if (j.contains("precision") && j.contains("coverage")) {
        PrdcScores s;
        s.precision = j.at("precision").get<double>();
        s.recall = j.at("recall").get<double>();
        s.density = j.at("density").get<double>();
        s.coverage = j.at("coverage").get<double>();
        s.k = j.at("k").get<std::size_t>();
        s.n_real = j.at("n_real").get<std::size_t>();
        s.n_fake = j.at("n_fake").get<std::size_t>();
        emit_report(s, report_out);
      } else {
        emit_report(report_from_json(j), report_out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << ojson{{"error", e.what()}, {"command", command}}.dump() << '\n';
    return 1;
  }
  return 0;
}
