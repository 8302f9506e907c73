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

// Subcommand implementations behind the teamzero executable. Each returns a
// process exit code: 0 success, 1 usage or configuration error, 2 runtime
// error. Messages go to `err`, progress to `log`.

#ifndef TEAMZERO_COMMANDS_HPP_
#define TEAMZERO_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "teamzero/checkpoint.hpp"
#include "teamzero/config.hpp"
#include "teamzero/match.hpp"
#include "teamzero/minimax.hpp"
#include "teamzero/occupancy.hpp"
#include "teamzero/puzzle_eval.hpp"
#include "teamzero/puzzles.hpp"
#include "teamzero/training.hpp"

namespace teamzero::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out = "out";
};

namespace internal {

inline std::uint64_t ResolveSeed(const std::optional<std::uint64_t>& flag,
                                 std::optional<std::uint64_t> config_seed,
                                 bool& was_random, std::ostream& log) {
  was_random = false;
  if (flag) return *flag;
  if (config_seed) return *config_seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  was_random = true;
  log << "seed: " << s << " (random)\n";
  return s;
}

inline std::map<std::string, std::string> ConfigSnapshot(const TrainConfig& c) {
  std::map<std::string, std::string> out;
  std::istringstream in(c.ToText());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

inline std::string Fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Runs `body`, mapping exceptions to exit codes.
template <typename F>
int Guard(std::ostream& err, F body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

inline void WriteText(const fs::path& path, const std::string& text) {
  teamzero::internal::WriteFile(path, text);
}

}  // namespace internal

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
  std::string config_path;
};

inline int Train(const TrainOptions& opt, const CommonOptions& common,
                 std::ostream& log, std::ostream& err) {
  if (!fs::exists(opt.config_path)) {
    err << "error: config file '" << opt.config_path << "' not found\n";
    return kExitUsage;
  }
  TrainConfig config;
  bool seed_random = false;
  {
    const int rc = internal::Guard(err, [&] {
      KeyValueConfig kv = KeyValueConfig::Load(opt.config_path);
      const bool has_seed = kv.Has("seed");
      config = TrainConfig::FromKeyValues(kv);
      config.seed = internal::ResolveSeed(
          common.seed, has_seed ? std::optional<std::uint64_t>(config.seed) : std::nullopt,
          seed_random, log);
      if (common.workers > 1) config.workers = common.workers;
      config.Validate();
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
  }
  return internal::Guard(err, [&] {
    const fs::path out(common.out);
    fs::create_directories(out);
    std::vector<StartCandidate> pool;
    if (!config.start.puzzle_file.empty()) {
      pool = StartCandidatesFrom(
          LoadPuzzles(config.start.puzzle_file, config.history_length));
    }
    Trainer trainer(config, std::move(pool));
    internal::WriteText(out / "config.txt", config.ToText());
    std::ofstream metrics(out / "metrics.csv", std::ios::binary);
    if (!metrics) throw PersistenceError("cannot write metrics.csv");
    metrics << MetricsHeader(config.n_players) << '\n';
    ExperimentManifest manifest;
    manifest.command = "train";
    manifest.seed = config.seed;
    manifest.seed_was_random = seed_random;
    manifest.config = internal::ConfigSnapshot(config);
    manifest.inputs.push_back(opt.config_path);
    if (!config.start.puzzle_file.empty()) {
      manifest.inputs.push_back(config.start.puzzle_file);
    }
    trainer.set_metrics_callback([&](const MetricsRow& row) {
      metrics << FormatMetrics(row) << '\n';
      metrics.flush();
      char buf[160];
      std::snprintf(buf, sizeof(buf),
                    "step %lld games %lld loss %.4f (value %.4f policy %.4f "
                    "intrinsic %.4f) |r_d| %.4g\n",
                    static_cast<long long>(row.step), static_cast<long long>(row.games),
                    row.loss.total, row.loss.value, row.loss.policy,
                    row.loss.intrinsic, row.mean_abs_rd);
      log << buf;
    });
    trainer.set_checkpoint_callback([&](const Trainer& t, std::int64_t step) {
      char name[32];
      std::snprintf(name, sizeof(name), "step_%08lld", static_cast<long long>(step));
      const fs::path dir = out / "checkpoints" / name;
      SaveCheckpoint(dir, t);
      manifest.checkpoints.push_back(dir.string());
    });
    trainer.Run();
    SaveCheckpoint(out / "checkpoint", trainer);
    manifest.checkpoints.push_back((out / "checkpoint").string());
    manifest.reports = {(out / "config.txt").string(), (out / "metrics.csv").string()};
    manifest.Write(out);
    log << "trained " << trainer.step() << " steps over " << trainer.games()
        << " games; checkpoint " << (out / "checkpoint").string() << "\n";
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// eval-puzzles

struct EvalPuzzlesOptions {
  std::string checkpoint;
  std::string puzzle_file;
  std::string rule = "all";        // VISIT, VALUE, LCB, GAP or all
  std::string kind = "any";        // expected puzzle kind, or any
  std::string subset = "all";      // all, train or test (checkpoint's split)
  std::string dataset;             // defaults to the file stem
  int n_simulations = 100;
  int n_eval_seeds = 3;
};

inline int EvalPuzzles(const EvalPuzzlesOptions& opt, const CommonOptions& common,
                       std::ostream& log, std::ostream& err) {
  std::vector<SelectionRule> rules;
  std::optional<PuzzleKind> kind;
  const int rc = internal::Guard(err, [&] {
    if (opt.rule == "all") {
      rules = {SelectionRule::kVisit, SelectionRule::kValue, SelectionRule::kLcb,
               SelectionRule::kGap};
    } else {
      rules = {ParseSelectionRule(opt.rule)};
    }
    if (opt.kind != "any") {
      try {
        kind = ParsePuzzleKind(opt.kind);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    if (opt.subset != "all" && opt.subset != "train" && opt.subset != "test") {
      throw ConfigError("subset must be all, train or test");
    }
    if (opt.n_simulations < 1 || opt.n_eval_seeds < 1) {
      throw ConfigError("simulations and eval seeds must be >= 1");
    }
    return kExitOk;
  });
  if (rc != kExitOk) return rc;
  return internal::Guard(err, [&] {
    Checkpoint ck = LoadCheckpoint(opt.checkpoint);
    std::vector<Puzzle> puzzles = LoadPuzzles(opt.puzzle_file, ck.config.history_length);
    if (puzzles.empty()) {
      err << "error: puzzle file '" << opt.puzzle_file << "' has no puzzles\n";
      return kExitRuntime;
    }
    const std::string dataset =
        opt.dataset.empty() ? fs::path(opt.puzzle_file).stem().string() : opt.dataset;
    const fs::path out(common.out);
    fs::create_directories(out);
    std::ofstream csv(out / "puzzles.csv", std::ios::binary);
    csv << kPuzzleCsvHeader << '\n';
    // Puzzles that cannot be scored by this checkpoint or rule set.
    std::vector<std::pair<std::string, std::string>> problems;  // id, message
    for (const auto& p : puzzles) {
      if (p.position.spec().id != ck.config.game) {
        problems.emplace_back(p.id, "game '" + p.position.spec().id +
                                        "' does not match checkpoint game '" +
                                        ck.config.game + "'");
      } else if (kind && p.kind != *kind) {
        problems.emplace_back(p.id, "kind '" + PuzzleKindName(p.kind) +
                                        "' does not match requested kind '" +
                                        PuzzleKindName(*kind) + "'");
      }
    }
    if (!problems.empty()) {
      for (const auto& [id, msg] : problems) {
        csv << kPuzzleCsvSchema << ',' << dataset << ',' << id << ",error,-,-,-,NA\n";
        err << "error: puzzle " << id << ": " << msg << "\n";
      }
      return kExitRuntime;
    }
    if (opt.subset != "all") {
      const SplitResult split = SplitCandidates(
          StartCandidatesFrom(puzzles), ck.config.start.split,
          ck.config.start.test_fraction, ck.config.start.split_seed);
      std::vector<Puzzle> chosen;
      for (std::size_t k : opt.subset == "train" ? split.train : split.test) {
        chosen.push_back(puzzles[k]);
      }
      puzzles = std::move(chosen);
    }
    bool seed_random = false;
    PuzzleEvalConfig cfg;
    cfg.search.n_simulations = opt.n_simulations;
    cfg.search.c_base = ck.config.c_base;
    cfg.search.c_init = ck.config.c_init;
    cfg.rules = rules;
    cfg.n_eval_seeds = opt.n_eval_seeds;
    cfg.seed = internal::ResolveSeed(common.seed, std::nullopt, seed_random, log);
    cfg.workers = common.workers;
    const auto rows = EvaluatePuzzles(dataset, puzzles, *ck.model, &ck.team, cfg);
    for (const auto& r : rows) WritePuzzleRow(csv, r);
    const auto summary = SummarizePuzzleScores(rows);
    std::ofstream sum(out / "puzzle_summary.csv", std::ios::binary);
    sum << kSummaryCsvHeader << '\n';
    for (const auto& s : summary) {
      WriteSummaryRow(sum, s);
      char buf[160];
      std::snprintf(buf, sizeof(buf), "%-18s %-6s %.4f +- %.4f\n", s.player.c_str(),
                    s.rule.c_str(), s.mean, s.std);
      log << buf;
    }
    ExperimentManifest manifest;
    manifest.command = "eval-puzzles";
    manifest.seed = cfg.seed;
    manifest.seed_was_random = seed_random;
    manifest.config = {{"rule", opt.rule},
                       {"kind", opt.kind},
                       {"subset", opt.subset},
                       {"dataset", dataset},
                       {"n_simulations", std::to_string(opt.n_simulations)},
                       {"n_eval_seeds", std::to_string(opt.n_eval_seeds)}};
    manifest.inputs = {opt.checkpoint, opt.puzzle_file};
    manifest.checkpoints = {opt.checkpoint};
    manifest.reports = {(out / "puzzles.csv").string(),
                        (out / "puzzle_summary.csv").string()};
    manifest.Write(out);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// match

struct MatchOptions {
  std::string checkpoint;
  std::string opponent;
  int n_openings = 16;
  int plies = 2;
  int n_seeds = 2;
  int n_simulations = 50;
  double loo_gap = 2.0 / 500.0;
};

inline int Match(const MatchOptions& opt, const CommonOptions& common,
                 std::ostream& log, std::ostream& err) {
  if (opt.n_openings < 1 || opt.plies < 0 || opt.n_seeds < 1 || opt.n_simulations < 1) {
    err << "error: openings, seeds and simulations must be >= 1, plies >= 0\n";
    return kExitUsage;
  }
  return internal::Guard(err, [&] {
    Checkpoint a = LoadCheckpoint(opt.checkpoint);
    Checkpoint b = LoadCheckpoint(opt.opponent);
    if (a.config.game != b.config.game) {
      err << "error: checkpoints play different games ('" << a.config.game
          << "' vs '" << b.config.game << "')\n";
      return kExitRuntime;
    }
    bool seed_random = false;
    const std::uint64_t seed =
        internal::ResolveSeed(common.seed, std::nullopt, seed_random, log);
    MinimaxSolver solver;
    const auto openings = GenerateOpenings(a.model->game(), solver, opt.plies,
                                           opt.n_openings, seed);
    if (openings.empty()) throw std::runtime_error("no balanced openings found");
    MatchConfig cfg;
    cfg.search.n_simulations = opt.n_simulations;
    cfg.search.c_base = a.config.c_base;
    cfg.search.c_init = a.config.c_init;
    cfg.n_seeds = opt.n_seeds;
    cfg.seed = seed;
    const auto records = PlayMatch(*a.model, *b.model, openings, cfg);
    const fs::path out(common.out);
    fs::create_directories(out);
    {
      std::ofstream f(out / "openings.csv", std::ios::binary);
      f << "schema,opening,position,oracle_value,line_imbalance\n";
      for (std::size_t k = 0; k < openings.size(); ++k) {
        f << "openings.v1," << k << ',' << openings[k].position.Serialize() << ','
          << openings[k].oracle_value << ',' << openings[k].line_imbalance << '\n';
      }
    }
    {
      std::ofstream f(out / "matches.csv", std::ios::binary);
      f << kMatchCsvHeader << '\n';
      for (const auto& r : records) WriteMatchRow(f, r);
    }
    const auto summary = SummarizeMatch(records, opt.loo_gap);
    {
      std::ofstream f(out / "match_summary.csv", std::ios::binary);
      f << kMatchSummaryHeader << '\n';
      for (const auto& r : summary) {
        WriteMatchSummaryRow(f, r);
        if (r.available) {
          char buf[128];
          std::snprintf(buf, sizeof(buf), "%-18s winrate %.4f elo %+.1f\n",
                        r.column.c_str(), r.winrate, r.elo);
          log << buf;
        } else {
          log << r.column << " unavailable (needs >= 2 seeds)\n";
        }
      }
    }
    ExperimentManifest manifest;
    manifest.command = "match";
    manifest.seed = seed;
    manifest.seed_was_random = seed_random;
    manifest.config = {{"n_openings", std::to_string(opt.n_openings)},
                       {"plies", std::to_string(opt.plies)},
                       {"n_seeds", std::to_string(opt.n_seeds)},
                       {"n_simulations", std::to_string(opt.n_simulations)},
                       {"loo_gap", internal::Fmt(opt.loo_gap)}};
    manifest.inputs = {opt.checkpoint, opt.opponent};
    manifest.checkpoints = {opt.checkpoint, opt.opponent};
    manifest.reports = {(out / "openings.csv").string(), (out / "matches.csv").string(),
                        (out / "match_summary.csv").string()};
    manifest.Write(out);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// gen-puzzles

struct GenPuzzlesOptions {
  std::string game = "tictactoe";
  std::string baseline;        // checkpoint for the hardness filter
  std::string kind = "all";    // unique, multi_choice, value or all
  int max_depth = -1;
  int max_steps = 3;
  int min_line_gap = 3;
  double threshold = 0.25;
};

inline int GenPuzzles(const GenPuzzlesOptions& opt, const CommonOptions& common,
                      std::ostream& log, std::ostream& err) {
  PuzzleCriteria criteria;
  const int rc = internal::Guard(err, [&] {
    GameSpec::FromId(opt.game);
    if (opt.kind != "all") {
      PuzzleKind k;
      try {
        k = ParsePuzzleKind(opt.kind);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
      criteria.unique = k == PuzzleKind::kUniqueMultiStep;
      criteria.multi_choice = k == PuzzleKind::kMultiChoiceScored;
      criteria.value_threshold = k == PuzzleKind::kValueThreshold;
    }
    if (opt.max_steps < 1) throw ConfigError("max-steps must be >= 1");
    if (!(opt.threshold > 0.0)) throw ConfigError("threshold must be positive");
    return kExitOk;
  });
  if (rc != kExitOk) return rc;
  return internal::Guard(err, [&] {
    criteria.max_depth = opt.max_depth;
    criteria.max_steps = opt.max_steps;
    criteria.min_line_gap = opt.min_line_gap;
    criteria.threshold = opt.threshold;
    std::optional<Checkpoint> baseline;
    if (!opt.baseline.empty()) {
      baseline = LoadCheckpoint(opt.baseline);
      if (baseline->config.game != opt.game) {
        throw std::runtime_error("baseline checkpoint plays '" + baseline->config.game + "'");
      }
      criteria.baseline = baseline->model.get();
    }
    const GameSpec& spec = baseline ? baseline->model->game() : GameSpec::FromId(opt.game);
    MinimaxSolver solver;
    const auto puzzles = GeneratePuzzles(spec, solver, criteria);
    const fs::path out(common.out);
    fs::create_directories(out);
    std::ostringstream text;
    WritePuzzles(text, puzzles);
    internal::WriteText(out / "puzzles.txt", text.str());
    int counts[3] = {0, 0, 0};
    for (const auto& p : puzzles) ++counts[static_cast<int>(p.kind)];
    for (int k = 0; k < 3; ++k) {
      log << PuzzleKindName(static_cast<PuzzleKind>(k)) << ": " << counts[k] << "\n";
    }
    ExperimentManifest manifest;
    manifest.command = "gen-puzzles";
    manifest.seed = common.seed.value_or(0);
    manifest.config = {{"game", opt.game},
                       {"kind", opt.kind},
                       {"max_depth", std::to_string(opt.max_depth)},
                       {"max_steps", std::to_string(opt.max_steps)},
                       {"min_line_gap", std::to_string(opt.min_line_gap)},
                       {"threshold", internal::Fmt(opt.threshold)},
                       {"baseline", opt.baseline}};
    if (!opt.baseline.empty()) manifest.inputs = {opt.baseline};
    manifest.reports = {(out / "puzzles.txt").string()};
    manifest.Write(out);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// report

struct ReportOptions {
  std::string checkpoint;
  int n_games = 20;
  int n_simulations = 50;
};

inline int Report(const ReportOptions& opt, const CommonOptions& common,
                  std::ostream& log, std::ostream& err) {
  if (opt.n_games < 1 || opt.n_simulations < 1) {
    err << "error: games and simulations must be >= 1\n";
    return kExitUsage;
  }
  return internal::Guard(err, [&] {
    Checkpoint ck = LoadCheckpoint(opt.checkpoint);
    bool seed_random = false;
    const std::uint64_t seed =
        internal::ResolveSeed(common.seed, std::nullopt, seed_random, log);
    SearchConfig search;
    search.n_simulations = opt.n_simulations;
    search.c_base = ck.config.c_base;
    search.c_init = ck.config.c_init;
    search.diversity = ck.config.diversity_active();
    const OccupancyReport rep = MeasureOccupancy(*ck.model, &ck.team, ck.model->game(),
                                                 search, opt.n_games, seed);
    const GraphPair graphs =
        BuildGraphs(ck.config.matchmaker, ck.payoffs, ck.config.n_players);
    const fs::path out(common.out);
    fs::create_directories(out);
    auto emit = [&](const char* name, auto write) {
      std::ofstream f(out / name, std::ios::binary);
      write(f);
    };
    emit("occupancy_mean.csv", [&](std::ostream& o) {
      WriteOccupancyTable(o, rep.mean, "occupancy_mean.v1");
    });
    emit("occupancy_centered.csv", [&](std::ostream& o) {
      WriteOccupancyTable(o, rep.centered, "occupancy_centered.v1");
    });
    emit("occupancy_std.csv", [&](std::ostream& o) { WriteOccupancyStd(o, rep); });
    emit("payoff.csv", [&](std::ostream& o) { ck.payoffs.WriteCsv(o); });
    emit("graph_first.csv", [&](std::ostream& o) { graphs[0].WriteCsv(o); });
    emit("graph_second.csv", [&](std::ostream& o) { graphs[1].WriteCsv(o); });
    emit("team.csv", [&](std::ostream& o) { WriteTeamCsv(o, ck.team); });
    double max_std = 0.0;
    for (double s : rep.std_dev) max_std = std::max(max_std, s);
    log << "players " << rep.n_players << ", features " << rep.feature_dim
        << ", max across-player std " << max_std << "\n";
    ExperimentManifest manifest;
    manifest.command = "report";
    manifest.seed = seed;
    manifest.seed_was_random = seed_random;
    manifest.config = {{"n_games", std::to_string(opt.n_games)},
                       {"n_simulations", std::to_string(opt.n_simulations)}};
    manifest.inputs = {opt.checkpoint};
    manifest.checkpoints = {opt.checkpoint};
    for (const char* name : {"occupancy_mean.csv", "occupancy_centered.csv",
                             "occupancy_std.csv", "payoff.csv", "graph_first.csv",
                             "graph_second.csv", "team.csv"}) {
      manifest.reports.push_back((out / name).string());
    }
    manifest.Write(out);
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::string position;  // GameState::Serialize() text
};

inline int Solve(const SolveOptions& opt, std::ostream& log, std::ostream& err) {
  GameState s = GameState::Initial(GameSpec::Get(GameKind::kTicTacToe));
  try {
    s = GameState::Parse(opt.position);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return internal::Guard(err, [&] {
    MinimaxSolver solver;
    const MinimaxSolution sol = solver.Solve(s);
    log << "position " << s.Serialize() << "\n";
    log << "value " << sol.value << "\n";
    log << "optimal";
    for (MoveId m : sol.optimal_moves) log << ' ' << m;
    log << "\n";
    return kExitOk;
  });
}

}  // namespace teamzero::cli

#endif  // TEAMZERO_COMMANDS_HPP_
