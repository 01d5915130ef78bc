#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "srgan/numeric_core.hpp"

namespace srgan {

/// csv: one sample per row, '.' decimal point, comma separated, optional
///      single header line.
/// fbv: "FBV1", u32 n, u32 d, then n·d float64 row-major, all little-endian.
enum class FeatureFormat { csv, fbv };

std::string_view to_string(FeatureFormat f);
FeatureFormat format_from_string(std::string_view s);
/// From the file extension (.csv or .fbv).
FeatureFormat format_from_path(const std::filesystem::path& p);

FeatureBatch read_csv_features(std::istream& in, bool header = false);
void write_csv_features(std::ostream& out, const FeatureBatch& b);
FeatureBatch read_fbv_features(std::istream& in);
void write_fbv_features(std::ostream& out, const FeatureBatch& b);

FeatureBatch load_features(const std::filesystem::path& path, FeatureFormat format,
                           bool header = false);
void write_features(const std::filesystem::path& path, const FeatureBatch& b,
                    FeatureFormat format);

}  // namespace srgan
