/*
 * Copyright 2026 The bassim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "bassim/cli.hpp"
#include "bassim/topology.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bassim {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bassim_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string default_scenario() {
    const std::string p = path("scenario.json");
    EXPECT_EQ(0, cli({"generate", "--out", p}).code);
    return p;
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateDefaultsToPaperScale) {
  const auto r = cli({"generate", "--out", path("s.json")});
  ASSERT_EQ(0, r.code) << r.err;
  const Scenario s = load_scenario(path("s.json"));
  EXPECT_EQ(60u, s.clients.size());
  EXPECT_EQ(8u, s.agg_servers.size());
  EXPECT_NE(std::string::npos, r.out.find("60 clients, 8 servers"));
}

TEST_F(CliTest, GenerateIsDeterministic) {
  ASSERT_EQ(0, cli({"generate", "--seed", "1", "--out", path("a.json")}).code);
  ASSERT_EQ(0, cli({"generate", "--seed", "1", "--out", path("b.json")}).code);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(CliTest, GenerateRejectsZeroClients) {
  const auto r = cli({"generate", "--clients", "0", "--out", path("s.json")});
  EXPECT_EQ(2, r.code);
  EXPECT_FALSE(fs::exists(path("s.json")));
}

TEST_F(CliTest, GenerateRejectsBadModelParams) {
  EXPECT_EQ(2, cli({"generate", "--cellular-low-mbps", "9", "--cellular-high-mbps",
                    "1", "--out", path("s.json")})
                   .code);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(2, cli({}).code);
  EXPECT_EQ(2, cli({"frobnicate"}).code);
  EXPECT_EQ(2, cli({"generate", "--out", path("s.json"), "--bogus", "1"}).code);
  EXPECT_EQ(0, cli({"--help"}).code);
}

TEST_F(CliTest, RunMatchesGolden) {
  const std::string scenario = default_scenario();
  const auto r = cli({"run", "--scenario", scenario, "--policy", "bass_greedy",
                      "--epochs", "5", "--seed", "1", "--out", path("out")});
  ASSERT_EQ(0, r.code) << r.err;
  EXPECT_EQ(slurp(fs::path(BASSIM_GOLDEN_DIR) / "run_bass_greedy.txt"), r.out);
  EXPECT_EQ(slurp(fs::path(BASSIM_GOLDEN_DIR) / "run_bass_greedy_summary.csv"),
            slurp(path("out/summary.csv")));
  const std::string records = slurp(path("out/records.csv"));
  EXPECT_GT(std::count(records.begin(), records.end(), '\n'), 1);
  EXPECT_NE(std::string::npos, r.out.find("frac_gamma_one:"));
}

TEST_F(CliTest, RunZeroEpochs) {
  const std::string scenario = default_scenario();
  const auto r = cli({"run", "--scenario", scenario, "--epochs", "0", "--out",
                      path("out")});
  ASSERT_EQ(0, r.code) << r.err;
  EXPECT_EQ(
      "policy,epoch,client_id,server_id,b_baseline_mbps,b_achieved_mbps,"
      "gain_mbps,gamma\n",
      slurp(path("out/records.csv")));
  EXPECT_NE(std::string::npos, r.out.find("records: 0\n"));
  EXPECT_NE(std::string::npos, r.out.find("mean_gamma: 0.000000\n"));
  EXPECT_NE(std::string::npos, r.out.find("frac_gamma_one: 0.000000\n"));
}

TEST_F(CliTest, RunIsByteIdenticalAcrossInvocations) {
  const std::string scenario = default_scenario();
  const std::vector<std::string> base{"run", "--scenario", scenario, "--policy",
                                      "random", "--epochs", "4", "--seed", "7",
                                      "--out"};
  auto a = base, b = base;
  a.push_back(path("a"));
  b.push_back(path("b"));
  const auto ra = cli(a), rb = cli(b);
  ASSERT_EQ(0, ra.code);
  EXPECT_EQ(ra.out, rb.out);
  for (const char* f : {"records.csv", "report.json", "summary.csv"}) {
    EXPECT_EQ(slurp(path(std::string("a/") + f)), slurp(path(std::string("b/") + f)))
        << f;
  }
}

TEST_F(CliTest, RunMissingScenario) {
  const auto r = cli({"run", "--scenario", path("nope.json"), "--out", path("out")});
  EXPECT_EQ(1, r.code);
  EXPECT_NE(std::string::npos, r.err.find("nope.json"));
}

TEST_F(CliTest, RunUnknownPolicy) {
  const std::string scenario = default_scenario();
  const auto r = cli({"run", "--scenario", scenario, "--policy", "oracle", "--out",
                      path("out")});
  EXPECT_EQ(2, r.code);
  EXPECT_NE(std::string::npos, r.err.find("bass_greedy"));
}

TEST_F(CliTest, RunExactOverCapIsRuntimeError) {
  const std::string scenario = default_scenario();
  const auto r = cli({"run", "--scenario", scenario, "--policy", "bass_exact",
                      "--epochs", "1", "--out", path("out")});
  EXPECT_EQ(1, r.code);
  EXPECT_NE(std::string::npos, r.err.find("greedy"));
}

TEST_F(CliTest, CompareGreedyBeatsRandom) {
  const std::string scenario = default_scenario();
  const auto r = cli({"compare", "--scenario", scenario, "--policies",
                      "bass_greedy,random", "--epochs", "5", "--seed", "3",
                      "--out", path("cmp")});
  ASSERT_EQ(0, r.code) << r.err;
  EXPECT_NE(std::string::npos, r.out.find("delta_mean_gamma"));

  std::istringstream csv(slurp(path("cmp/compare.csv")));
  std::string header, greedy, random;
  std::getline(csv, header);
  std::getline(csv, greedy);
  std::getline(csv, random);
  auto mean_gamma = [](const std::string& line) {
    std::istringstream in(line);
    std::string field;
    for (int i = 0; i < 4; ++i) std::getline(in, field, ',');
    return std::stod(field);
  };
  EXPECT_EQ(0u, greedy.rfind("bass_greedy,", 0));
  EXPECT_EQ(0u, random.rfind("random,", 0));
  EXPECT_GE(mean_gamma(greedy), mean_gamma(random));
}

TEST_F(CliTest, CompareSinglePolicyHasNoDelta) {
  const std::string scenario = default_scenario();
  const auto r = cli({"compare", "--scenario", scenario, "--policies", "random",
                      "--epochs", "2"});
  ASSERT_EQ(0, r.code) << r.err;
  EXPECT_EQ(std::string::npos, r.out.find("delta"));
}

TEST_F(CliTest, CompareUnknownPolicyListsValidNames) {
  const std::string scenario = default_scenario();
  const auto r = cli({"compare", "--scenario", scenario, "--policies",
                      "bass_greedy,magic"});
  EXPECT_EQ(2, r.code);
  EXPECT_NE(std::string::npos, r.err.find("bass_exact, bass_greedy, random"));
}

TEST_F(CliTest, CompareIsReproducible) {
  const std::string scenario = default_scenario();
  const std::vector<std::string> args{"compare", "--scenario", scenario,
                                      "--epochs", "3", "--runs", "2"};
  const auto a = cli(args), b = cli(args);
  ASSERT_EQ(0, a.code);
  EXPECT_EQ(a.out, b.out);
}

TEST_F(CliTest, ReportConvertsJsonToCsv) {
  const std::string scenario = default_scenario();
  ASSERT_EQ(0, cli({"run", "--scenario", scenario, "--epochs", "2", "--out",
                    path("out")})
                   .code);
  const auto r = cli({"report", "--input", path("out/report.json"), "--format",
                      "csv", "--out", path("again.csv")});
  ASSERT_EQ(0, r.code) << r.err;
  EXPECT_EQ(slurp(path("out/records.csv")), slurp(path("again.csv")));
  EXPECT_NE(std::string::npos, r.out.find("bass_greedy"));
  EXPECT_EQ(1, cli({"report", "--input", path("missing.json")}).code);
}

}  // namespace
}  // namespace bassim
