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

// teamzero: train, evaluate and inspect latent-conditioned game-playing teams.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "teamzero/commands.hpp"

namespace {

void AddCommon(CLI::App* app, teamzero::cli::CommonOptions& common,
               std::optional<std::uint64_t>& seed) {
  app->add_option("--seed", seed, "Random seed (default: config value or random)");
  app->add_option("--workers", common.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  app->add_option("--out", common.out, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
  namespace tc = teamzero::cli;
  CLI::App app{"teamzero: diverse-team AlphaZero on small board games"};
  app.require_subcommand(1);
  tc::CommonOptions common;
  std::optional<std::uint64_t> seed;

  tc::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Run self-play training");
  train_cmd->add_option("--config", train.config_path, "Training config file")
      ->required();
  AddCommon(train_cmd, common, seed);

  tc::EvalPuzzlesOptions eval;
  auto* eval_cmd = app.add_subcommand("eval-puzzles", "Score a checkpoint on puzzles");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint directory")
      ->required();
  eval_cmd->add_option("--puzzles", eval.puzzle_file, "Puzzle file")->required();
  eval_cmd->add_option("--rule", eval.rule, "VISIT, VALUE, LCB, GAP or all");
  eval_cmd->add_option("--kind", eval.kind, "Expected puzzle kind, or any");
  eval_cmd->add_option("--subset", eval.subset,
                       "all, or the train/test part of the checkpoint's split");
  eval_cmd->add_option("--dataset", eval.dataset, "Dataset label");
  eval_cmd->add_option("--simulations", eval.n_simulations, "Simulations per search");
  eval_cmd->add_option("--eval-seeds", eval.n_eval_seeds, "Evaluation seeds");
  AddCommon(eval_cmd, common, seed);

  tc::MatchOptions match;
  auto* match_cmd = app.add_subcommand("match", "Play a team against an opponent");
  match_cmd->add_option("--checkpoint", match.checkpoint, "Team checkpoint")
      ->required();
  match_cmd->add_option("--opponent", match.opponent, "Opponent checkpoint")
      ->required();
  match_cmd->add_option("--openings", match.n_openings, "Number of openings");
  match_cmd->add_option("--plies", match.plies, "Random plies per opening");
  match_cmd->add_option("--seeds", match.n_seeds, "Seeds per opening");
  match_cmd->add_option("--simulations", match.n_simulations, "Simulations per move");
  match_cmd->add_option("--loo-gap", match.loo_gap,
                        "Leave-one-out gap (negative: plain argmax)");
  AddCommon(match_cmd, common, seed);

  tc::GenPuzzlesOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-puzzles", "Generate oracle-labelled puzzles");
  gen_cmd->add_option("--game", gen.game, "tictactoe or connect4");
  gen_cmd->add_option("--checkpoint", gen.baseline,
                      "Baseline checkpoint for the hardness filter");
  gen_cmd->add_option("--kind", gen.kind, "unique, multi_choice, value or all");
  gen_cmd->add_option("--max-depth", gen.max_depth, "Maximum moves played (-1: all)");
  gen_cmd->add_option("--max-steps", gen.max_steps, "Agent moves per unique line");
  gen_cmd->add_option("--min-line-gap", gen.min_line_gap,
                      "Open-line imbalance for value puzzles");
  gen_cmd->add_option("--threshold", gen.threshold, "Value puzzle threshold");
  AddCommon(gen_cmd, common, seed);

  tc::ReportOptions report;
  auto* report_cmd = app.add_subcommand("report", "Occupancy and league reports");
  report_cmd->add_option("--checkpoint", report.checkpoint, "Checkpoint directory")
      ->required();
  report_cmd->add_option("--games", report.n_games, "Self-play games per player");
  report_cmd->add_option("--simulations", report.n_simulations, "Simulations per move");
  AddCommon(report_cmd, common, seed);

  tc::SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Exact value of a position");
  solve_cmd->add_option("position", solve.position,
                        "Position, e.g. \"tictactoe X...O.... X\"")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? tc::kExitOk : tc::kExitUsage;
  }
  common.seed = seed;

  if (*train_cmd) return tc::Train(train, common, std::cout, std::cerr);
  if (*eval_cmd) return tc::EvalPuzzles(eval, common, std::cout, std::cerr);
  if (*match_cmd) return tc::Match(match, common, std::cout, std::cerr);
  if (*gen_cmd) return tc::GenPuzzles(gen, common, std::cout, std::cerr);
  if (*report_cmd) return tc::Report(report, common, std::cout, std::cerr);
  if (*solve_cmd) return tc::Solve(solve, std::cout, std::cerr);
  return tc::kExitUsage;
}
