// Copyright 2026 The teamzero Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_runner.hpp"

namespace teamzero {
namespace {

using testutil::Cli;
using testutil::ReadAll;
namespace fs = std::filesystem;

std::vector<std::string> Lines(const fs::path& p) {
  std::istringstream in(ReadAll(p));
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> Fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  for (std::string f; std::getline(s, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// One workspace shared by the whole suite: a trained team, a generated puzzle
// file and a reference run of every command.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() /
                         ("teamzero_cli_test_" + std::to_string(::getpid())));
    fs::remove_all(*root_);
    fs::create_directories(*root_);
    const auto start = std::chrono::steady_clock::now();
    smoke_ = Cli("train --config " + Config("smoke.cfg") + " --out " + Dir("solo"));
    smoke_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    team_ = Cli("train --config " + Config("smoke_team.cfg") + " --out " + Dir("team"));
    gen_ = Cli("gen-puzzles --game tictactoe --max-depth 3 --seed 1 --out " + Dir("gen"));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
  }
  static std::string Config(const std::string& name) {
    return std::string(TEAMZERO_CONFIG_DIR) + "/" + name;
  }
  static std::string Dir(const std::string& name) { return (*root_ / name).string(); }
  static std::string Ckpt(const std::string& run) { return Dir(run) + "/checkpoint"; }
  static std::string Puzzles() { return Dir("gen") + "/puzzles.txt"; }

  static fs::path* root_;
  static testutil::CliResult smoke_, team_, gen_;
  static double smoke_seconds_;
};
fs::path* CliTest::root_ = nullptr;
testutil::CliResult CliTest::smoke_, CliTest::team_, CliTest::gen_;
double CliTest::smoke_seconds_ = 0.0;

TEST_F(CliTest, SmokeTrainingIsFast) {
  ASSERT_EQ(smoke_.exit_code, 0) << smoke_.output;
  ASSERT_EQ(team_.exit_code, 0) << team_.output;
  EXPECT_LT(smoke_seconds_, 60.0);
  for (const char* f : {"config.txt", "metrics.csv", "manifest.json", "checkpoint/params.txt",
                        "checkpoints/step_00000100/team.txt"}) {
    EXPECT_TRUE(fs::exists(Dir("solo") + "/" + f)) << f;
  }
  EXPECT_NE(smoke_.output.find("step 200"), std::string::npos) << smoke_.output;
  const auto metrics = Lines(Dir("solo") + "/metrics.csv");
  EXPECT_EQ(metrics[0].rfind("schema,step,games,loss_total", 0), 0u);
  EXPECT_EQ(metrics.size(), 5u);
}

TEST_F(CliTest, MissingConfigNamesThePath) {
  const auto r = Cli("train --config /no/such/file.cfg --out " + Dir("missing"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("/no/such/file.cfg"), std::string::npos) << r.output;
}

TEST_F(CliTest, InvalidConfigNamesTheField) {
  const fs::path bad = *root_ / "bad.cfg";
  std::ofstream(bad) << "game = tictactoe\nkeep_probability = 1.5\n";
  auto r = Cli("train --config " + bad.string() + " --out " + Dir("bad"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("keep_probability"), std::string::npos) << r.output;
  std::ofstream(bad) << "game = tictactoe\nlambada = 0.5\n";
  r = Cli("train --config " + bad.string() + " --out " + Dir("bad"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("lambada"), std::string::npos) << r.output;
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli("").exit_code, 1);
  EXPECT_EQ(Cli("--help").exit_code, 0);
  EXPECT_EQ(Cli("frobnicate").exit_code, 1);
  EXPECT_EQ(Cli("eval-puzzles --checkpoint x").exit_code, 1);  // --puzzles missing
  EXPECT_EQ(Cli("eval-puzzles --checkpoint /nope --puzzles " + Puzzles() + " --out " +
                Dir("nope")).exit_code, 2);
  EXPECT_EQ(Cli("eval-puzzles --checkpoint " + Ckpt("team") + " --puzzles " + Puzzles() +
                " --rule BEST --out " + Dir("nope")).exit_code, 1);
}

TEST_F(CliTest, SolveQueriesTheOracle) {
  auto r = Cli("solve \"tictactoe XX.OO.... X\"");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("value 1"), std::string::npos) << r.output;
  r = Cli("solve \"tictactoe ......... X\"");
  EXPECT_NE(r.output.find("value 0"), std::string::npos) << r.output;
  EXPECT_EQ(Cli("solve \"chess .\"").exit_code, 1);
}

TEST_F(CliTest, EmptyPuzzleFileFails) {
  const fs::path empty = *root_ / "empty.txt";
  std::ofstream(empty) << "# teamzero-puzzles v1\n";
  const auto r = Cli("eval-puzzles --checkpoint " + Ckpt("team") + " --puzzles " +
                     empty.string() + " --out " + Dir("empty"));
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.output.find("no puzzles"), std::string::npos) << r.output;
}

TEST_F(CliTest, KindMismatchWritesErrorRow) {
  ASSERT_EQ(gen_.exit_code, 0) << gen_.output;
  const auto r = Cli("eval-puzzles --checkpoint " + Ckpt("team") + " --puzzles " + Puzzles() +
                     " --kind value --out " + Dir("mismatch"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
  const auto rows = Lines(Dir("mismatch") + "/puzzles.csv");
  ASSERT_GE(rows.size(), 2u);
  EXPECT_NE(rows[1].find("error"), std::string::npos) << rows[1];
}

TEST_F(CliTest, GenPuzzlesPrintsCountsAndFiltersKind) {
  for (const char* kind : {"unique", "multi_choice", "value"}) {
    EXPECT_NE(gen_.output.find(kind), std::string::npos) << gen_.output;
  }
  const auto r = Cli("gen-puzzles --game tictactoe --max-depth 3 --kind value --out " +
                     Dir("gen_value"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  int n = 0;
  for (const auto& l : Lines(Dir("gen_value") + "/puzzles.txt")) {
    if (l.empty() || l[0] == '#') continue;
    EXPECT_NE(l.find("\tvalue\t"), std::string::npos) << l;
    ++n;
  }
  EXPECT_GT(n, 0);
}

TEST_F(CliTest, EvalPuzzlesSchemaAndSummary) {
  const auto r = Cli("eval-puzzles --checkpoint " + Ckpt("team") + " --puzzles " + Puzzles() +
                     " --rule GAP --simulations 8 --eval-seeds 3 --seed 4 --out " + Dir("eval"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto rows = Lines(Dir("eval") + "/puzzles.csv");
  ASSERT_GT(rows.size(), 1u);
  EXPECT_EQ(rows[0], "schema,dataset,puzzle_id,kind,seed,player,rule,score");
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(Fields(rows[k]).size(), 8u) << rows[k];
  const auto sum = Lines(Dir("eval") + "/puzzle_summary.csv");
  EXPECT_EQ(sum[0], "schema,dataset,player,rule,mean,std,n_seeds,n_puzzles");
  bool saw_sub = false;
  for (std::size_t k = 1; k < sum.size(); ++k) {
    const auto f = Fields(sum[k]);
    ASSERT_EQ(f.size(), 8u);
    EXPECT_EQ(f[6], "3");
    saw_sub |= f[2] == "subadditive" && f[3] == "GAP";
  }
  EXPECT_TRUE(saw_sub);
}

TEST_F(CliTest, MatchSchemaAndSeedPrecondition) {
  auto r = Cli("match --checkpoint " + Ckpt("team") + " --opponent " + Ckpt("solo") +
               " --openings 3 --seeds 1 --simulations 4 --seed 2 --out " + Dir("match1"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto sum = Lines(Dir("match1") + "/match_summary.csv");
  EXPECT_EQ(sum[0], "schema,column,available,mean_score,winrate,elo");
  bool saw = false;
  for (const auto& l : sum) {
    const auto f = Fields(l);
    if (f[1] == "subadditive") {
      EXPECT_EQ(f[2], "0");
      EXPECT_EQ(f[3], "NA");
      saw = true;
    }
  }
  EXPECT_TRUE(saw);
  EXPECT_EQ(Lines(Dir("match1") + "/matches.csv")[0], "schema,opening,color,seed,player,score");
  EXPECT_EQ(Lines(Dir("match1") + "/openings.csv")[0].rfind("schema,", 0), 0u);
}

TEST_F(CliTest, MatchRejectsDifferentGames) {
  const fs::path cfg = *root_ / "c4.cfg";
  std::ofstream(cfg) << "game = connect4\nn_players = 1\ntotal_steps = 1\nn_simulations = 2\n"
                        "batch_size = 2\ngames_per_iteration = 1\nupdates_per_iteration = 1\n"
                        "seed = 3\n";
  ASSERT_EQ(Cli("train --config " + cfg.string() + " --out " + Dir("c4")).exit_code, 0);
  const auto r = Cli("match --checkpoint " + Ckpt("team") + " --opponent " + Ckpt("c4") +
                     " --out " + Dir("mixed"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("different games"), std::string::npos) << r.output;
}

TEST_F(CliTest, ReportShapes) {
  const auto r = Cli("report --checkpoint " + Ckpt("team") +
                     " --games 3 --simulations 4 --seed 5 --out " + Dir("report"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const int d = 18, n = 3;
  const auto mean = Lines(Dir("report") + "/occupancy_mean.csv");
  EXPECT_EQ(mean[0], "schema,player,feature,value");
  EXPECT_EQ(static_cast<int>(mean.size()) - 1, n * d);
  EXPECT_EQ(Lines(Dir("report") + "/occupancy_std.csv")[0], "schema,feature,std");
  EXPECT_EQ(static_cast<int>(Lines(Dir("report") + "/occupancy_std.csv").size()) - 1, d);
  EXPECT_EQ(Lines(Dir("report") + "/payoff.csv")[0],
            "schema,seat,i,j,wins,draws,losses,games");
  EXPECT_EQ(Lines(Dir("report") + "/team.csv")[0], "schema,player,lambda,feature,psi");
  for (const char* g : {"graph_first.csv", "graph_second.csv"}) {
    const auto rows = Lines(Dir("report") + "/" + g);
    EXPECT_EQ(rows[0], "schema,row,j0,j1,j2");
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto f = Fields(rows[k]);
      double s = 0.0;
      for (std::size_t c = 2; c < f.size(); ++c) s += std::stod(f[c]);
      EXPECT_NEAR(s, 1.0, 1e-9) << rows[k];
    }
  }
}

TEST_F(CliTest, SoloReportHasZeroSpread) {
  ASSERT_EQ(Cli("report --checkpoint " + Ckpt("solo") + " --games 2 --simulations 4 --out " +
                Dir("solo_report")).exit_code, 0);
  const auto rows = Lines(Dir("solo_report") + "/occupancy_std.csv");
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(std::stod(Fields(rows[k])[2]), 0.0);
}

TEST_F(CliTest, ManifestRecordsRun) {
  const std::string m = ReadAll(Dir("solo") + "/manifest.json");
  for (const char* key : {"\"manifest.v1\"", "\"command\"", "\"seed\"", "\"git\"",
                          "\"checkpoints\"", "\"reports\"", "\"schemas\""}) {
    EXPECT_NE(m.find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, RandomSeedIsLogged) {
  const auto r = Cli("match --checkpoint " + Ckpt("solo") + " --opponent " + Ckpt("solo") +
                     " --openings 1 --simulations 2 --out " + Dir("seedless"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("(random)"), std::string::npos) << r.output;
  EXPECT_NE(ReadAll(Dir("seedless") + "/manifest.json").find("\"seed_was_random\": true"),
            std::string::npos);
}

TEST_F(CliTest, EveryCommandIsDeterministic) {
  const auto results = testutil::CheckDeterminism(*root_ / "det", Config("smoke_team.cfg"));
  for (const auto& [file, same] : results) EXPECT_TRUE(same) << file;
  EXPECT_GE(results.size(), 15u);
}

}  // namespace
}  // namespace teamzero
