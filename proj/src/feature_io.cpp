#include "srgan/feature_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace srgan {

namespace {

constexpr std::array<char, 4> kFbvMagic = {'F', 'B', 'V', '1'};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

bool get_bytes(std::istream& in, unsigned char* dst, std::size_t n) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount()) == n;
}

}  // namespace

std::string_view to_string(FeatureFormat f) { return f == FeatureFormat::csv ? "csv" : "fbv"; }

FeatureFormat format_from_string(std::string_view s) {
  if (s == "csv") return FeatureFormat::csv;
  if (s == "fbv") return FeatureFormat::fbv;
  throw Error("unknown feature format '" + std::string(s) + "' (expected csv or fbv)");
}

FeatureFormat format_from_path(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".csv") return FeatureFormat::csv;
  if (ext == ".fbv") return FeatureFormat::fbv;
  throw Error("cannot infer feature format from '" + p.string() + "'; pass --format");
}

FeatureBatch read_csv_features(std::istream& in, bool header) {
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      const auto cell = trim(body.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                  : comma - start));
      ++col;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error("csv line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                    ": '" + std::string(cell) + "' is not a number");
      }
      if (!std::isfinite(v)) {
        throw Error("csv line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                    ": value is not finite");
      }
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      d = col;
    } else if (col != d) {
      throw Error("csv line " + std::to_string(line_no) + " has " + std::to_string(col) +
                  " columns, expected " + std::to_string(d));
    }
    ++rows;
  }
  if (rows == 0) throw Error("csv input contains no samples");
  return FeatureBatch(rows, d, std::move(values));
}

void write_csv_features(std::ostream& out, const FeatureBatch& b) {
  char buf[32];
  for (std::size_t i = 0; i < b.n(); ++i) {
    for (std::size_t j = 0; j < b.d(); ++j) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), b(i, j));
      (void)ec;
      if (j) out.put(',');
      out.write(buf, ptr - buf);
    }
    out.put('\n');
  }
}

FeatureBatch read_fbv_features(std::istream& in) {
  unsigned char head[12];
  if (!get_bytes(in, head, 12)) throw Error("fbv: truncated header (need 12 bytes)");
  if (std::memcmp(head, kFbvMagic.data(), 4) != 0) throw Error("fbv: bad magic at offset 0");
  auto u32 = [&](std::size_t off) {
    return static_cast<std::uint32_t>(head[off]) | (static_cast<std::uint32_t>(head[off + 1]) << 8) |
           (static_cast<std::uint32_t>(head[off + 2]) << 16) |
           (static_cast<std::uint32_t>(head[off + 3]) << 24);
  };
  const std::uint32_t n = u32(4);
  const std::uint32_t d = u32(8);
  if (n == 0 || d == 0) throw Error("fbv: header declares an empty batch");
  const std::size_t count = static_cast<std::size_t>(n) * d;
  std::vector<double> values(count);
  unsigned char raw[8];
  for (std::size_t k = 0; k < count; ++k) {
    if (!get_bytes(in, raw, 8)) {
      throw Error("fbv: truncated payload at offset " + std::to_string(12 + 8 * k));
    }
    std::uint64_t bits = 0;
    for (int i = 7; i >= 0; --i) bits = (bits << 8) | raw[i];
    values[k] = std::bit_cast<double>(bits);
    if (!std::isfinite(values[k])) {
      throw Error("fbv: non-finite value at offset " + std::to_string(12 + 8 * k));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error("fbv: trailing bytes after offset " + std::to_string(12 + 8 * count));
  }
  return FeatureBatch(n, d, std::move(values));
}

void write_fbv_features(std::ostream& out, const FeatureBatch& b) {
  if (b.n() > std::numeric_limits<std::uint32_t>::max() ||
      b.d() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error("fbv: batch too large for a u32 header");
  }
  out.write(kFbvMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(b.n()));
  put_u32(out, static_cast<std::uint32_t>(b.d()));
  for (std::size_t i = 0; i < b.n(); ++i) {
    for (std::size_t j = 0; j < b.d(); ++j) put_f64(out, b(i, j));
  }
}

FeatureBatch load_features(const std::filesystem::path& path, FeatureFormat format, bool header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open feature file '" + path.string() + "'");
  try {
    return format == FeatureFormat::csv ? read_csv_features(in, header) : read_fbv_features(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_features(const std::filesystem::path& path, const FeatureBatch& b,
                    FeatureFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write feature file '" + path.string() + "'");
  if (format == FeatureFormat::csv) {
    write_csv_features(out, b);
  } else {
    write_fbv_features(out, b);
  }
  out.flush();
  if (!out) throw Error("failed while writing '" + path.string() + "'");
}

}  // namespace srgan
