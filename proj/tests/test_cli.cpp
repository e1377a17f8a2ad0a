#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <mmjump/cli.hpp>

#include "support.hpp"

namespace mmjump {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mmjump_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_model(const std::string& name, const nlohmann::json& doc) const {
    std::ofstream(path(name)) << doc.dump(2);
    return path(name);
  }

  fs::path dir_;
  const std::string model_ = testing::source_path("models/two_state.json");
};

TEST_F(CliTest, StationaryPrintsPi) {
  const auto r = cli({"stationary", "--model", model_});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "pi = (0.6666666666666666, 0.3333333333333333)\n");
}

TEST_F(CliTest, ValidateShippedModels) {
  for (const char* m : {"models/two_state.json", "models/two_state_cp.json", "models/single_state_poisson.json"}) {
    const auto r = cli({"validate", "--model", testing::source_path(m), "--out", path("v")});
    EXPECT_EQ(r.code, kExitOk) << m << "\n" << r.out << r.err;
  }
  EXPECT_TRUE(fs::exists(path("v/pa_report.json")));
  EXPECT_TRUE(fs::exists(path("v/c3c4_report.json")));
  EXPECT_TRUE(fs::exists(path("v/manifest.json")));
}

TEST_F(CliTest, NegativeRateRejectedAtParse) {
  auto doc = nlohmann::json::parse(slurp(model_));
  doc["jumps"][0][1]["rate"] = -3;
  const auto r = cli({"validate", "--model", write_model("neg.json", doc)});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("jumps[0][1].rate"), std::string::npos) << r.err;
}

TEST_F(CliTest, NonStochasticRowNamed) {
  auto doc = nlohmann::json::parse(slurp(model_));
  doc["switching"]["P"][1] = {0.3, 0.3};
  const auto r = cli({"validate", "--model", write_model("p.json", doc)});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("row 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrorsAreRuntimeExit) {
  EXPECT_EQ(cli({}).code, kExitRuntime);
  EXPECT_EQ(cli({"simulate", "--model", model_, "--T", "abc", "--out", path("x")}).code, kExitRuntime);
  EXPECT_EQ(cli({"stationary", "--model", path("missing.json")}).code, kExitRuntime);
}

TEST_F(CliTest, OutOfRangeEpsRejected) {
  EXPECT_EQ(cli({"simulate", "--model", model_, "--eps", "1.5", "--out", path("s")}).code, kExitValidation);
}

TEST_F(CliTest, SimulateTwiceIsByteIdentical) {
  for (const char* d : {"a", "b"}) {
    const auto r = cli({"simulate", "--model", model_, "--eps", "0.05", "--seed", "42", "--out", path(d)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  for (const char* f : {"trajectory.csv", "characteristics.csv", "terminal.csv", "manifest.json"}) {
    EXPECT_EQ(slurp(path(std::string("a/") + f)), slurp(path(std::string("b/") + f))) << f;
  }
  EXPECT_EQ(slurp(path("a/trajectory.csv")).rfind("t,kind,xi_0,state\n", 0), 0u);
}

TEST_F(CliTest, DifferentSeedsDiffer) {
  cli({"simulate", "--model", model_, "--seed", "1", "--out", path("a")});
  cli({"simulate", "--model", model_, "--seed", "2", "--out", path("b")});
  EXPECT_NE(slurp(path("a/trajectory.csv")), slurp(path("b/trajectory.csv")));
}

TEST_F(CliTest, ManifestRecordsSeedVersionAndHashes) {
  ASSERT_EQ(cli({"stationary", "--model", model_, "--seed", "7", "--out", path("m")}).code, kExitOk);
  const auto m = nlohmann::json::parse(slurp(path("m/manifest.json")));
  EXPECT_EQ(m["schema"], "mmjump.manifest/1");
  EXPECT_EQ(m["seed"], 7);
  EXPECT_FALSE(m["version"].get<std::string>().empty());
  EXPECT_EQ(m["outputs"].size(), 1u);
  EXPECT_EQ(m["outputs"][0]["file"], "stationary.json");
}

TEST_F(CliTest, ReplayReproducesLimitRun) {
  ASSERT_EQ(cli({"limit", "--model", model_, "--seed", "3", "--out", path("l")}).code, kExitOk);
  const auto r = cli({"replay", "--manifest", path("l/manifest.json"), "--out", path("r")});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  for (const auto& e : fs::directory_iterator(path("l"))) {
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "r" / e.path().filename())) << e.path().filename();
  }
}

TEST_F(CliTest, ReplayDetectsHashMismatch) {
  ASSERT_EQ(cli({"simulate", "--model", model_, "--out", path("s")}).code, kExitOk);
  auto m = nlohmann::json::parse(slurp(path("s/manifest.json")));
  m["outputs"][0]["fnv1a"] = "0000000000000000";
  std::ofstream(path("s/manifest.json")) << m.dump(2);
  EXPECT_EQ(cli({"replay", "--manifest", path("s/manifest.json"), "--out", path("r")}).code, kExitValidation);
}

TEST_F(CliTest, VerifySmallRunWritesReport) {
  const auto r = cli({"verify", "--model", testing::source_path("models/single_state_poisson.json"), "--N", "500",
                      "--bootstrap", "20", "--out", path("v")});
  EXPECT_TRUE(r.code == kExitOk || r.code == kExitValidation) << r.err;
  const auto rep = nlohmann::json::parse(slurp(path("v/report.json")));
  EXPECT_EQ(rep["schema"], "mmjump.report/1");
  EXPECT_EQ(rep["rows"].size(), 4u);
  EXPECT_NE(r.out.find(rep["verdict"]["passed"].get<bool>() ? "PASS" : "FAIL"), std::string::npos);
}

TEST_F(CliTest, CsvFormat) {
  ASSERT_EQ(cli({"stationary", "--model", model_, "--format", "csv", "--out", path("c")}).code, kExitOk);
  EXPECT_EQ(slurp(path("c/stationary.csv")).rfind("state,pi\n", 0), 0u);
}

}  // namespace
}  // namespace mmjump
