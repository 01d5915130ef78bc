#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "srgan/feature_io.hpp"

using namespace srgan;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "srgan_feature_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string error_of(const std::string& csv, bool header = false) {
  std::istringstream in(csv);
  try {
    read_csv_features(in, header);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("feature_io") {

TEST_CASE("fbv round trip is bit-identical") {
  const auto b = seeded_standard_normal(16, 4, 0);
  const auto path = scratch("batch.fbv");
  write_features(path, b, FeatureFormat::fbv);
  CHECK(fs::file_size(path) == 12 + 16 * 4 * 8);
  CHECK(load_features(path, FeatureFormat::fbv) == b);
}

TEST_CASE("fbv header layout is little-endian") {
  std::ostringstream out;
  write_fbv_features(out, FeatureBatch(2, 3, {1, 2, 3, 4, 5, 6}));
  const auto s = out.str();
  REQUIRE(s.size() == 12 + 48);
  CHECK(s.substr(0, 4) == "FBV1");
  CHECK(static_cast<unsigned char>(s[4]) == 2);
  CHECK(static_cast<unsigned char>(s[8]) == 3);
  double first = 0.0;
  std::memcpy(&first, s.data() + 12, 8);
  CHECK(first == 1.0);
}

TEST_CASE("csv round trip is exact") {
  const auto b = seeded_standard_normal(16, 4, 1);
  const auto path = scratch("batch.csv");
  write_features(path, b, FeatureFormat::csv);
  const auto back = load_features(path, FeatureFormat::csv);
  CHECK((back.data() - b.data()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("csv parsing details") {
  std::istringstream in("a,b\n1,2.5\n-3e2,4\n");
  const auto b = read_csv_features(in, true);
  CHECK(b.n() == 2);
  CHECK(b.d() == 2);
  CHECK(b(1, 0) == -300.0);
  std::istringstream crlf("1,2\r\n3,4\r\n");
  CHECK(read_csv_features(crlf).n() == 2);
}

TEST_CASE("csv errors name the line and column") {
  const auto msg = error_of("0.5,1\n1.5,abc\n");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column 2") != std::string::npos);
  CHECK(error_of("1,2\n3\n").find("line 2") != std::string::npos);
  CHECK_FALSE(error_of("").empty());
  CHECK_FALSE(error_of("x,y\n", true).empty());
  CHECK_FALSE(error_of("1,nan\n").empty());
}

TEST_CASE("empty files are errors, not empty batches") {
  const auto path = scratch("empty.csv");
  std::ofstream(path).close();
  CHECK_THROWS_AS(load_features(path, FeatureFormat::csv), Error);
  const auto fbv = scratch("empty.fbv");
  std::ofstream(fbv).close();
  CHECK_THROWS_AS(load_features(fbv, FeatureFormat::fbv), Error);
}

TEST_CASE("malformed fbv inputs") {
  std::ostringstream out;
  write_fbv_features(out, FeatureBatch(2, 2, {1, 2, 3, 4}));
  const auto good = out.str();

  auto bad_magic = good;
  bad_magic[0] = 'X';
  std::istringstream m(bad_magic);
  CHECK_THROWS_AS(read_fbv_features(m), Error);

  std::istringstream truncated(good.substr(0, good.size() - 3));
  CHECK_THROWS_WITH_AS(read_fbv_features(truncated), doctest::Contains("offset"), Error);

  std::istringstream trailing(good + "z");
  CHECK_THROWS_WITH_AS(read_fbv_features(trailing), doctest::Contains("trailing"), Error);
}

TEST_CASE("format names and inference") {
  CHECK(format_from_string("csv") == FeatureFormat::csv);
  CHECK(format_from_string("fbv") == FeatureFormat::fbv);
  CHECK(to_string(FeatureFormat::fbv) == "fbv");
  CHECK(format_from_path("x/y.csv") == FeatureFormat::csv);
  CHECK(format_from_path("y.fbv") == FeatureFormat::fbv);
  CHECK_THROWS_AS(format_from_path("y.txt"), Error);
  CHECK_THROWS_AS(format_from_string("npy"), Error);
  CHECK_THROWS_AS(load_features(scratch("missing.csv"), FeatureFormat::csv), Error);
}

}  // TEST_SUITE
