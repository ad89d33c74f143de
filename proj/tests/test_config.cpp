#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "affint/config.hpp"
#include "affint/report.hpp"

using namespace affint;

namespace {

ConfigErrorCode error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ConfigErrorCode::Io;
}

}  // namespace

TEST(Config, Minimal) {
  const auto c = parse_config(R"({"d": 1, "maps": [{"matrix": [0.45], "translation": [0]}]})");
  EXPECT_EQ(c.d, 1);
  EXPECT_EQ(c.maps.size(), 1u);
  EXPECT_NEAR(c.gates.delta, 0.45, 1e-16);
}

TEST(Config, NestedMatrix) {
  const auto c = parse_config(R"({"d": 2, "maps": [{"matrix": [[0.4, 0.1], [0, 0.3]], "translation": [1, 2]}], "seed": 5})");
  EXPECT_EQ(c.maps[0].matrix(0, 1), 0.1);
  EXPECT_EQ(c.seed, 5u);
}

TEST(Config, ArityErrorNamesMap) {
  try {
    parse_config(R"({"d": 2, "maps": [{"matrix": [0.4,0,0,0.4], "translation": [0,0]}, {"matrix": [0.4, 0, 0], "translation": [0, 0]}]})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ConfigErrorCode::ArityMismatch);
    EXPECT_NE(e.context().find("maps[1]"), std::string::npos) << e.context();
  }
}

TEST(Config, ErrorCodes) {
  EXPECT_EQ(error_of("{\"d\": 1,"), ConfigErrorCode::MalformedJson);
  EXPECT_EQ(error_of(R"({"maps": []})"), ConfigErrorCode::MissingField);
  EXPECT_EQ(error_of(R"({"d": "one", "maps": []})"), ConfigErrorCode::WrongType);
  EXPECT_EQ(error_of(R"({"d": 1, "maps": [{"matrix": [1e999], "translation": [0]}]})"), ConfigErrorCode::NonFinite);
  EXPECT_EQ(error_of(R"({"d": 1, "maps": [{"matrix": [0], "translation": [0]}]})"), ConfigErrorCode::SingularMatrix);
  EXPECT_EQ(error_of(R"({"d": 1, "maps": [{"matrix": [1.5], "translation": [0]}]})"), ConfigErrorCode::NotContracting);
}

TEST(Config, MalformedHasPosition) {
  try {
    parse_config("{\n  \"d\": 1,\n  \"maps\": [}\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(e.context().find("line 3"), std::string::npos) << e.context();
  }
}

TEST(Config, MissingFile) {
  try {
    load_config("/nonexistent/affint.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ConfigErrorCode::Io);
  }
}

TEST(Config, GridDemoGates) {
  std::string text = R"({"d": 2, "maps": [)";
  for (int i = 0; i < 25; ++i) {
    if (i) text += ",";
    text += R"({"matrix": [0.45, 0, 0, 0.45], "translation": [)" + std::to_string((i % 5) / 4.0) + "," +
            std::to_string((i / 5) / 4.0) + "]}";
  }
  text += "]}";
  const auto c = parse_config(text);
  EXPECT_NEAR(c.gates.conformal_sum, 25 * std::pow(0.45, 4), 1e-13);
  EXPECT_EQ(c.gates.max_commutator, 0.0);
}

TEST(Config, CanonicalRoundTrip) {
  const auto c = parse_config(R"({"d": 2, "maps": [{"matrix": [[0.1, 0.2], [0.3, 0.4]], "translation": [0.1, 1e-300]}], "seed": 3})");
  const std::string s = serialize_config(c);
  const auto c2 = parse_config(s);
  EXPECT_EQ(serialize_config(c2), s);
  EXPECT_EQ(config_hash(c2), config_hash(c));
  EXPECT_EQ(config_hash(c).size(), 16u);
  auto c3 = c;
  c3.seed = 4;
  EXPECT_NE(config_hash(c3), config_hash(c));
}

TEST(Report, SeventeenDigits) {
  Json j;
  j["x"] = 0.1;
  j["n"] = std::nan("");
  j["v"] = {1.0, 2.5};
  const std::string s = dump_json(j);
  EXPECT_NE(s.find("0.10000000000000001"), std::string::npos) << s;
  EXPECT_NE(s.find("\"n\": null"), std::string::npos) << s;
  EXPECT_NE(s.find("[1, 2.5]"), std::string::npos) << s;
  EXPECT_EQ(Json::parse(s)["x"].get<double>(), 0.1);
}

TEST(Report, Fnv1a) {
  // published FNV-1a 64 test vectors
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Report, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "affint_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "r.json").string();
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "two");
  std::size_t files = 0;
  for (auto& e : std::filesystem::directory_iterator(dir)) files += e.is_regular_file();
  EXPECT_EQ(files, 1u);
  // a regular file where the directory should be
  EXPECT_THROW(write_file_atomic(path + "/x.json", "x"), std::exception);
  std::filesystem::remove_all(dir);
}
