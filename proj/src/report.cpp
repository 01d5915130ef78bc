#include "srgan/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace srgan {

namespace {

using ojson = nlohmann::ordered_json;

std::string num(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error("bad checksum '" + s + "'");
  return v;
}

ojson to_array(const Vector& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vector_from(const nlohmann::json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

ojson spec_to_json(const HistogramSpec& s) {
  return {{"max", s.max()}, {"min", s.min()}, {"bins", s.bins()}, {"sigma", s.sigma()}};
}

HistogramSpec spec_from_json(const nlohmann::json& j) {
  return HistogramSpec(j.at("max").get<double>(), j.at("min").get<double>(),
                       j.at("bins").get<std::size_t>(), j.at("sigma").get<double>());
}

ojson hist_to_json(const SoftHistogram& h) {
  ojson freqs = ojson::array();
  for (double f : h.freqs) freqs.push_back(f);
  return {{"raw_mass", h.raw_mass}, {"freqs", std::move(freqs)}};
}

SoftHistogram hist_from_json(const nlohmann::json& j, const HistogramSpec& spec) {
  SoftHistogram h;
  h.centers = bin_centers(spec);
  h.raw_mass = j.at("raw_mass").get<double>();
  h.freqs = j.at("freqs").get<std::vector<double>>();
  if (h.freqs.size() != h.centers.size()) throw Error("histogram has the wrong number of bins");
  return h;
}

ojson make_manifest(std::uint64_t seed, ojson config) {
  ojson m;
  m["tool"] = "srgan";
  m["version"] = kToolVersion;
  m["rng"] = Rng::kName;
  m["seed"] = seed;
  m["config"] = std::move(config);
  return m;
}

ojson report_config(const ExperimentReport& r) {
  ojson c;
  c["condition"] = r.condition;
  c["pretrained"] = r.pretrained;
  c["trunk_frozen"] = r.trunk_frozen;
  c["steps"] = r.steps;
  c["step_size"] = r.step_size;
  c["batch"] = r.batch;
  c["weights"] = weights_to_json(r.weights);
  c["histogram"] = spec_to_json(r.spec);
  return c;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) throw Error("failed while writing '" + path.string() + "'");
}

ojson scores_to_json(const PrdcScores& s) {
  ojson j;
  j["precision"] = s.precision;
  j["recall"] = s.recall;
  j["density"] = s.density;
  j["coverage"] = s.coverage;
  j["k"] = s.k;
  j["n_real"] = s.n_real;
  j["n_fake"] = s.n_fake;
  return j;
}

ojson report_to_json(const ExperimentReport& r) {
  ojson j;
  j["condition"] = r.condition;
  j["seed"] = r.seed;
  j["config"] = report_config(r);
  j["eval_samples"] = r.eval_samples;

  ojson summary;
  summary["std_min"] = r.stats.std.size() ? r.stats.std.minCoeff() : 0.0;
  summary["std_max"] = r.stats.std.size() ? r.stats.std.maxCoeff() : 0.0;
  summary["corr_offdiag_mean"] = r.corr_offdiag_mean;
  summary["mean_hist_kl"] = r.mean_hist_kl;
  summary["centroid_accuracy"] = r.centroid_accuracy;
  summary["classifier_accuracy"] =
      r.classifier_accuracy ? ojson(*r.classifier_accuracy) : ojson(nullptr);
  summary["final_loss"] = r.loss_trace.empty() ? 0.0 : r.loss_trace.back();
  j["summary"] = std::move(summary);

  j["mean"] = to_array(r.stats.mean);
  j["std"] = to_array(r.stats.std);
  ojson corr = ojson::array();
  for (Eigen::Index p = 0; p < r.corr.m.rows(); ++p) corr.push_back(to_array(r.corr.m.row(p).transpose()));
  j["corr"] = std::move(corr);
  j["hist_kl"] = r.hist_kl;
  j["trunk_checksum_before"] = hex64(r.trunk_checksum_before);
  j["trunk_checksum_after"] = hex64(r.trunk_checksum_after);
  ojson hists = ojson::array();
  for (const auto& h : r.histograms) hists.push_back(hist_to_json(h));
  j["histograms"] = std::move(hists);
  j["reference"] = hist_to_json(r.reference);
  j["loss_trace"] = r.loss_trace;
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    ExperimentReport r;
    const auto& cfg = j.at("config");
    r.condition = j.at("condition").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.pretrained = cfg.at("pretrained").get<bool>();
    r.trunk_frozen = cfg.at("trunk_frozen").get<bool>();
    r.steps = cfg.at("steps").get<std::size_t>();
    r.step_size = cfg.at("step_size").get<double>();
    r.batch = cfg.at("batch").get<std::size_t>();
    r.weights = weights_from_json(cfg.at("weights"));
    r.spec = spec_from_json(cfg.at("histogram"));
    r.eval_samples = j.at("eval_samples").get<std::size_t>();
    const auto& summary = j.at("summary");
    r.corr_offdiag_mean = summary.at("corr_offdiag_mean").get<double>();
    r.mean_hist_kl = summary.at("mean_hist_kl").get<double>();
    r.centroid_accuracy = summary.at("centroid_accuracy").get<double>();
    if (!summary.at("classifier_accuracy").is_null()) {
      r.classifier_accuracy = summary.at("classifier_accuracy").get<double>();
    }
    r.stats.mean = vector_from(j.at("mean"));
    r.stats.std = vector_from(j.at("std"));
    const auto& corr = j.at("corr");
    const auto d = static_cast<Eigen::Index>(corr.size());
    r.corr.m.resize(d, d);
    for (Eigen::Index p = 0; p < d; ++p) {
      const auto row = vector_from(corr[static_cast<std::size_t>(p)]);
      if (row.size() != d) throw Error("correlation matrix is not square");
      r.corr.m.row(p) = row.transpose();
    }
    r.hist_kl = j.at("hist_kl").get<std::vector<double>>();
    r.trunk_checksum_before = parse_hex64(j.at("trunk_checksum_before").get<std::string>());
    r.trunk_checksum_after = parse_hex64(j.at("trunk_checksum_after").get<std::string>());
    for (const auto& h : j.at("histograms")) r.histograms.push_back(hist_from_json(h, r.spec));
    r.reference = hist_from_json(j.at("reference"), r.spec);
    r.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed experiment report: ") + e.what());
  }
}

std::string histogram_csv(const SoftHistogram& h) {
  std::string out = "center,freq\n";
  for (std::size_t k = 0; k < h.freqs.size(); ++k) {
    out += num(h.centers[k]) + "," + num(h.freqs[k]) + "\n";
  }
  return out;
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += num(m(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string histogram_svg(const std::vector<SoftHistogram>& hists, const SoftHistogram& reference) {
  constexpr int kPanelW = 240;
  constexpr int kPanelH = 150;
  constexpr int kPad = 20;
  constexpr int kCols = 4;
  const int count = static_cast<int>(hists.size());
  const int rows = std::max(1, (count + kCols - 1) / kCols);
  const int width = kCols * (kPanelW + kPad) + kPad;
  const int height = rows * (kPanelH + 2 * kPad) + kPad;

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int p = 0; p < count; ++p) {
    const auto& h = hists[static_cast<std::size_t>(p)];
    const int x0 = kPad + (p % kCols) * (kPanelW + kPad);
    const int y0 = 2 * kPad + (p / kCols) * (kPanelH + 2 * kPad);
    double top = 0.0;
    for (double f : h.freqs) top = std::max(top, f);
    for (double f : reference.freqs) top = std::max(top, f);
    if (top <= 0.0) top = 1.0;
    const double bar_w = static_cast<double>(kPanelW) / static_cast<double>(h.freqs.size());
    s << "<g>\n<text x=\"" << x0 << "\" y=\"" << y0 - 6 << "\" font-family=\"sans-serif\" font-size=\"12\">feature "
      << p << "</text>\n";
    s << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << kPanelW << "\" height=\"" << kPanelH
      << "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (std::size_t k = 0; k < h.freqs.size(); ++k) {
      const double bh = h.freqs[k] / top * kPanelH;
      s << "<rect x=\"" << fixed(x0 + static_cast<double>(k) * bar_w) << "\" y=\""
        << fixed(y0 + kPanelH - bh) << "\" width=\"" << fixed(bar_w) << "\" height=\"" << fixed(bh)
        << "\" fill=\"#e6862a\"/>\n";
    }
    s << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < reference.freqs.size(); ++k) {
      if (k) s << ' ';
      s << fixed(x0 + (static_cast<double>(k) + 0.5) * bar_w) << ','
        << fixed(y0 + kPanelH - reference.freqs[k] / top * kPanelH);
    }
    s << "\"/>\n</g>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string correlation_svg(const CorrMatrix& corr) {
  constexpr int kCell = 48;
  constexpr int kPad = 30;
  const auto d = static_cast<int>(corr.m.rows());
  const int size = d * kCell + 2 * kPad;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
    << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      const double a = std::min(1.0, std::abs(corr.m(p, q)));
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - a)));
      const int x = kPad + q * kCell;
      const int y = kPad + p * kCell;
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\"" << kCell
        << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"#ccc\"/>\n";
      s << "<text x=\"" << x + kCell / 2 << "\" y=\"" << y + kCell / 2 + 4
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
        << (a > 0.5 ? "white" : "black") << "\">" << fixed(a) << "</text>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

ReportBundle emit_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create report directory '" + dir.string() + "': " + ec.message());

  ReportBundle bundle;
  auto write = [&](const std::string& name, const std::string& text) {
    write_text_file(dir / name, text);
    bundle.artifacts.push_back(dir / name);
  };

  const auto record = report_to_json(r);
  write("report.json", record.dump(2) + "\n");

  std::string stats = "dim,mean,std,hist_kl\n";
  for (Eigen::Index d = 0; d < r.stats.mean.size(); ++d) {
    stats += std::to_string(d) + "," + num(r.stats.mean[d]) + "," + num(r.stats.std[d]) + "," +
             num(r.hist_kl[static_cast<std::size_t>(d)]) + "\n";
  }
  write("stats.csv", stats);
  write("corr.csv", matrix_csv(r.corr.m));
  std::string trace = "step,loss\n";
  for (std::size_t t = 0; t < r.loss_trace.size(); ++t) {
    trace += std::to_string(t) + "," + num(r.loss_trace[t]) + "\n";
  }
  write("trace.csv", trace);
  for (std::size_t d = 0; d < r.histograms.size(); ++d) {
    write("hist_dim" + std::to_string(d) + ".csv", histogram_csv(r.histograms[d]));
  }
  write("histograms.svg", histogram_svg(r.histograms, r.reference));
  write("corr.svg", correlation_svg(r.corr));

  bundle.summary = record.at("summary");
  bundle.manifest = make_manifest(r.seed, report_config(r));
  ojson files = ojson::array();
  for (const auto& p : bundle.artifacts) files.push_back(p.filename().string());
  files.push_back("manifest.json");
  bundle.manifest["artifacts"] = std::move(files);
  bundle.manifest["summary"] = bundle.summary;
  write("manifest.json", bundle.manifest.dump(2) + "\n");
  return bundle;
}

ReportBundle emit_report(const PrdcScores& s, const std::filesystem::path& dir,
                         const ojson& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create report directory '" + dir.string() + "': " + ec.message());
  ReportBundle bundle;
  bundle.summary = scores_to_json(s);
  write_text_file(dir / "scores.json", bundle.summary.dump(2) + "\n");
  bundle.artifacts.push_back(dir / "scores.json");
  bundle.manifest = make_manifest(0, config);
  bundle.manifest.erase("seed");
  bundle.manifest["artifacts"] = ojson::array({"scores.json", "manifest.json"});
  write_text_file(dir / "manifest.json", bundle.manifest.dump(2) + "\n");
  bundle.artifacts.push_back(dir / "manifest.json");
  return bundle;
}

}  // namespace srgan
