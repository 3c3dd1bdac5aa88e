#include <cmath>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mincap/examples.hpp"
#include "mincap/serialize.hpp"

using namespace mincap;
using nlohmann::json;

TEST(Serialize, FnvHashKnownVectors) {
  // 64-bit FNV-1a of the compact dump; "{}" and "null" hashed by hand
  auto fnv = [](const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  };
  EXPECT_EQ(config_hash(json::object()), fnv("{}"));
  EXPECT_EQ(config_hash(json{{"a", 1}}), fnv(R"({"a":1})"));
  EXPECT_EQ(hex_hash(0x1234), "0000000000001234");
}

TEST(Serialize, HashIgnoresKeyInsertionOrder) {
  json a;
  a["x"] = 1;
  a["y"] = 2;
  json b;
  b["y"] = 2;
  b["x"] = 1;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(json{{"x", 1}, {"y", 3}}));
}

TEST(Serialize, HeaderLine) {
  const json cfg{{"k", "v"}};
  EXPECT_EQ(header_line(cfg), "# mincap 0.1.0 config=" + hex_hash(config_hash(cfg)));
}

TEST(Serialize, FiniteSafe) {
  const json doc{{"a", INFINITY}, {"b", {-INFINITY, NAN, 1.5}}, {"c", "text"}};
  const json s = finite_safe(doc);
  EXPECT_EQ(s["a"], "inf");
  EXPECT_EQ(s["b"][0], "-inf");
  EXPECT_EQ(s["b"][1], "nan");
  EXPECT_EQ(s["b"][2], 1.5);
  EXPECT_EQ(s["c"], "text");
}

TEST(Serialize, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) EXPECT_EQ(std::stod(format_double(x)), x);
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(format_double(NAN), "nan");
}

TEST(Serialize, WithMeta) {
  const json cfg{{"argv", {"capacity"}}};
  const json doc = with_meta({{"value", 2.0}}, cfg);
  EXPECT_EQ(doc["tool"], "mincap");
  EXPECT_EQ(doc["version"], "0.1.0");
  EXPECT_EQ(doc["config_hash"], hex_hash(config_hash(cfg)));
  EXPECT_EQ(doc["config"], cfg);
  EXPECT_EQ(doc["result"]["value"], 2.0);
}

TEST(Serialize, ProfileCsv) {
  const auto m = build(parse_example_id("flat2"));
  const auto p = shoot_for_drop(m, 1.0, 3.0, 0.2);
  std::ostringstream out;
  write_profile_csv(out, p, m, json::object());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# mincap", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "r,u,du,w");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, p.grid.size());
}

TEST(Serialize, SweepCsv) {
  const auto m = build(parse_example_id("flat3"));
  std::vector<CapacityResult> rows{minimal_capacity(m, 1, 2, 0.1), classical_capacity(m, 1, INFINITY)};
  std::ostringstream out;
  write_sweep_csv(out, rows, json::object());
  const std::string s = out.str();
  EXPECT_NE(s.find("r_a,r_b,t,cap,method,interior,trace_inner,trace_outer"), std::string::npos);
  EXPECT_NE(s.find(",inf,"), std::string::npos);
}
