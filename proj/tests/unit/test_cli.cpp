#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mincap_cli/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mincap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mincap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mincap_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Cli, ClassicalCapacityOfThePlane) {
  const auto r = invoke({"capacity", "--example", "flat2", "--ra", "1", "--rb", "10", "--json"});
  ASSERT_EQ(r.code, mincap::cli::kExitOk) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["result"]["value"].get<double>(), 2.7287527076836824, 1e-9);
  EXPECT_EQ(doc["tool"], "mincap");
}

TEST(Cli, ZeroGapIsAValidRequest) {
  EXPECT_EQ(invoke({"capacity", "--example", "flat2", "--ra", "1", "--rb", "10", "--t", "0"}).code,
            mincap::cli::kExitOk);
}

TEST(Cli, UnknownExampleIsAnInputError) {
  const auto r = invoke({"capacity", "--example", "bogus", "--ra", "1", "--rb", "2"});
  EXPECT_EQ(r.code, mincap::cli::kExitInput);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, BadArgumentsAreInputErrors) {
  EXPECT_EQ(invoke({"capacity", "--example", "flat2", "--ra", "2", "--rb", "1"}).code, mincap::cli::kExitInput);
  EXPECT_EQ(invoke({"no-such-command"}).code, mincap::cli::kExitInput);
  EXPECT_EQ(invoke({"capacity", "--example", "flat2", "--params", "{oops"}).code, mincap::cli::kExitInput);
}

TEST(Cli, HelpExitsCleanly) { EXPECT_EQ(invoke({"--help"}).code, mincap::cli::kExitOk); }

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> args{"capacity", "--example", "flat3", "--ra", "1", "--rb", "5",
                                      "--t",      "0.3",       "--json"};
  const auto a = invoke(args);
  const auto b = invoke(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OutputDirectoryReceivesJson) {
  const auto dir = scratch("out");
  const auto r = invoke({"profile", "--example", "flat2", "--ra", "1", "--rb", "4", "--t", "0.2", "--out",
                         dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "profile.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "profile.csv"));
  std::ifstream csv(dir / "profile.csv");
  std::string first;
  std::getline(csv, first);
  EXPECT_EQ(first.rfind("# mincap 0.1.0 config=", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ReproduceStaircase) {
  const auto r = invoke({"reproduce", "staircase", "--i", "3", "--k", "10", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["result"]["I_at_alpha_ki"].get<double>(), 3.0, 1e-9);
}

TEST(Cli, ReproduceClassification) {
  const auto r = invoke({"reproduce", "flat3", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nonparabolic"), std::string::npos);
}

TEST(Cli, ScalingAuditPasses) {
  const auto r = invoke({"audit", "scaling", "--example", "flat3", "--ra", "1", "--rb", "4", "--t", "0.2", "--T",
                         "0.6"});
  EXPECT_EQ(r.code, mincap::cli::kExitOk) << r.err;
}

TEST(Cli, MeshRoundTrip) {
  const auto dir = scratch("mesh");
  ASSERT_EQ(invoke({"make-mesh", "annulus", "--r-inner", "1", "--r-outer", "3", "--rings", "6", "--sectors", "24",
                    "--out", dir.string()})
                .code,
            0);
  const auto r = invoke({"mesh-capacity", "--mesh", (dir / "mesh.off").string(), "--tags",
                         (dir / "tags.json").string(), "--t", "0.1", "--levels", "3", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_GT(doc["result"]["J"].get<double>(), 0.0);
  std::filesystem::remove_all(dir);
}

TEST(Cli, MakeMeshNeedsOutputDirectory) {
  EXPECT_EQ(invoke({"make-mesh", "annulus"}).code, mincap::cli::kExitInput);
}
