#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "srgan/prdc.hpp"
#include "srgan/toy_lab.hpp"

namespace srgan {

inline constexpr const char* kToolVersion = "0.1.0";

/// What a report emission wrote: a manifest (tool version, config echo,
/// seed), the artifact paths, and headline numbers.
struct ReportBundle {
  nlohmann::ordered_json manifest;
  std::vector<std::filesystem::path> artifacts;
  nlohmann::ordered_json summary;
};

nlohmann::ordered_json scores_to_json(const PrdcScores& s);

/// Full experiment record; round-trips through report_from_json.
nlohmann::ordered_json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);

std::string histogram_csv(const SoftHistogram& h);
std::string matrix_csv(const Matrix& m);
/// One panel per feature dimension: soft-histogram bars with the N(0, 1)
/// reference overlaid as a line.
std::string histogram_svg(const std::vector<SoftHistogram>& hists, const SoftHistogram& reference);
/// |correlation| heat map.
std::string correlation_svg(const CorrMatrix& corr);

/// Writes report.json, manifest.json, stats.csv, corr.csv, trace.csv,
/// hist_dim{d}.csv, histograms.svg and corr.svg under dir.
ReportBundle emit_report(const ExperimentReport& r, const std::filesystem::path& dir);

/// Writes scores.json and manifest.json under dir.
ReportBundle emit_report(const PrdcScores& s, const std::filesystem::path& dir,
                         const nlohmann::ordered_json& config = nlohmann::ordered_json::object());

/// Writes text exactly, surfacing I/O failures with the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace srgan
