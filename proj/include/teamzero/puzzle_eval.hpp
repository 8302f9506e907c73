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

// Puzzle evaluation of a team: each player alone, sub-additive selection
// under every rule, and max-over-latents, repeated over evaluation seeds.

#ifndef TEAMZERO_PUZZLE_EVAL_HPP_
#define TEAMZERO_PUZZLE_EVAL_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "teamzero/puzzles.hpp"
#include "teamzero/random.hpp"
#include "teamzero/search.hpp"
#include "teamzero/subadditive.hpp"

namespace teamzero {

struct PuzzleEvalConfig {
  SearchConfig search;  // diversity is usually off at evaluation time
  std::vector<int> players;  // latents to evaluate; empty means all
  std::vector<SelectionRule> rules = {SelectionRule::kVisit, SelectionRule::kValue,
                                      SelectionRule::kLcb, SelectionRule::kGap};
  int n_eval_seeds = 3;
  std::uint64_t seed = 0;
  int workers = 1;
};

// One CSV row. `player` is a latent index, or -1 for a sub-additive row
// (with `rule` set) or -2 for the max-over-latents row.
struct PuzzleScoreRow {
  std::string dataset;
  std::string puzzle_id;
  PuzzleKind kind = PuzzleKind::kUniqueMultiStep;
  int seed = 0;
  int player = 0;
  std::string rule = "-";
  double score = 0.0;

  std::string PlayerLabel() const {
    if (player == -1) return "subadditive";
    if (player == -2) return "max_over_latents";
    return std::to_string(player);
  }
};

inline constexpr const char* kPuzzleCsvHeader =
    "schema,dataset,puzzle_id,kind,seed,player,rule,score";
inline constexpr const char* kPuzzleCsvSchema = "puzzles.v1";

inline void WritePuzzleRow(std::ostream& out, const PuzzleScoreRow& r) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", r.score);
  out << kPuzzleCsvSchema << ',' << r.dataset << ',' << r.puzzle_id << ','
      << PuzzleKindName(r.kind) << ',' << r.seed << ',' << r.PlayerLabel() << ','
      << r.rule << ',' << buf << '\n';
}

namespace internal {

// Memoised per-(player, position) searches for one puzzle and one seed. The
// rng of each search is derived from the position and player so results do
// not depend on evaluation order.
class SearchCache {
 public:
  SearchCache(const Evaluator& evaluator, const TeamState* team,
              const SearchConfig& cfg, std::uint64_t seed)
      : evaluator_(evaluator), team_(team), cfg_(cfg), seed_(seed) {}

  const PlayerStats& Get(const GameState& s, int player) {
    const auto key = std::make_tuple(s.BoardKey(), s.move_count(), player);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Rng rng(DeriveSeed(DeriveSeed(seed_, s.BoardKey()), player));
    SearchConfig cfg = cfg_;
    if (team_) cfg.lambda = team_->lambda.at(player);
    const SearchResult r = RunSearch(s, player, evaluator_, team_, cfg, rng);
    return cache_.emplace(key, PlayerStats::From(r)).first->second;
  }

 private:
  const Evaluator& evaluator_;
  const TeamState* team_;
  SearchConfig cfg_;
  std::uint64_t seed_;
  std::map<std::tuple<std::uint64_t, int, int>, PlayerStats> cache_;
};

// Scores one puzzle for a "chooser" mapping a position to (move, root q).
template <typename Chooser>
double ScoreWith(const Puzzle& p, Chooser choose) {
  switch (p.kind) {
    case PuzzleKind::kUniqueMultiStep:
      return ScorePuzzle(p, MovePolicy([&](const GameState& s) {
                           return choose(s).move;
                         }));
    case PuzzleKind::kMultiChoiceScored:
      return ScorePuzzle(p, choose(p.position).move);
    case PuzzleKind::kValueThreshold:
      return ScorePuzzle(p, choose(p.position).q);
  }
  return 0.0;
}

}  // namespace internal

// Rows are ordered by seed, then puzzle. With workers > 1 puzzles are scored
// concurrently; the output does not depend on the worker count.
inline std::vector<PuzzleScoreRow> EvaluatePuzzles(
    const std::string& dataset, const std::vector<Puzzle>& puzzles,
    const Evaluator& evaluator, const TeamState* team,
    const PuzzleEvalConfig& cfg) {
  std::vector<int> players = cfg.players;
  if (players.empty()) {
    for (int j = 0; j < evaluator.n_players(); ++j) players.push_back(j);
  }
  auto score_one = [&](const Puzzle& p, int seed) {
    std::vector<PuzzleScoreRow> rows;
    internal::SearchCache cache(evaluator, team, cfg.search,
                                DeriveSeed(cfg.seed, seed));
    auto row = [&](int player, const std::string& rule, double score) {
      rows.push_back(PuzzleScoreRow{dataset, p.id, p.kind, seed, player, rule, score});
    };
    std::vector<double> per_player;
    for (int j : players) {
      const double s = internal::ScoreWith(p, [&](const GameState& st) {
        const RootMoveStats& m = cache.Get(st, j).Best();
        return Selection{j, m.move, m.q};
      });
      per_player.push_back(s);
      row(j, "-", s);
    }
    for (SelectionRule rule : cfg.rules) {
      const double s = internal::ScoreWith(p, [&](const GameState& st) {
        std::vector<PlayerStats> stats;
        for (int j : players) stats.push_back(cache.Get(st, j));
        Selection sel = SubadditiveSelect(stats, rule);
        sel.player = players[sel.player];
        return sel;
      });
      row(-1, SelectionRuleName(rule), s);
    }
    row(-2, "-", MaxOverLatents(per_player));
    return rows;
  };
  const std::size_t n_tasks = puzzles.size() * static_cast<std::size_t>(cfg.n_eval_seeds);
  std::vector<std::vector<PuzzleScoreRow>> slots(n_tasks);
  std::vector<std::exception_ptr> errors(n_tasks);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n_tasks;) {
      try {
        slots[k] = score_one(puzzles[k % puzzles.size()],
                             static_cast<int>(k / puzzles.size()));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(cfg.workers, static_cast<int>(n_tasks)));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < n_threads; ++w) threads.emplace_back(work);
    for (auto& t : threads) t.join();
  }
  std::vector<PuzzleScoreRow> rows;
  for (std::size_t k = 0; k < n_tasks; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    rows.insert(rows.end(), slots[k].begin(), slots[k].end());
  }
  return rows;
}

struct ScoreSummary {
  std::string dataset;
  std::string player;
  std::string rule;
  double mean = 0.0;  // mean over seeds of the per-seed solve rate
  double std = 0.0;   // population std over seeds
  int n_seeds = 0;
  int n_puzzles = 0;
};

inline constexpr const char* kSummaryCsvHeader =
    "schema,dataset,player,rule,mean,std,n_seeds,n_puzzles";
inline constexpr const char* kSummaryCsvSchema = "puzzle_summary.v1";

inline std::vector<ScoreSummary> SummarizePuzzleScores(
    const std::vector<PuzzleScoreRow>& rows) {
  // (dataset, player label, rule) -> seed -> (sum, count)
  std::map<std::tuple<std::string, std::string, std::string>,
           std::map<int, std::pair<double, int>>> acc;
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.dataset, r.PlayerLabel(), r.rule);
    if (!acc.count(key)) order.push_back(key);
    auto& cell = acc[key][r.seed];
    cell.first += r.score;
    cell.second += 1;
  }
  std::vector<ScoreSummary> out;
  for (const auto& key : order) {
    const auto& seeds = acc[key];
    std::vector<double> rates;
    int n_puzzles = 0;
    for (const auto& [seed, sc] : seeds) {
      rates.push_back(sc.first / sc.second);
      n_puzzles = sc.second;
    }
    double mean = 0.0;
    for (double x : rates) mean += x;
    mean /= rates.size();
    double var = 0.0;
    for (double x : rates) var += (x - mean) * (x - mean);
    var /= rates.size();
    out.push_back(ScoreSummary{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                               mean, std::sqrt(var), static_cast<int>(rates.size()),
                               n_puzzles});
  }
  return out;
}

inline void WriteSummaryRow(std::ostream& out, const ScoreSummary& s) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.6f,%.6f", s.mean, s.std);
  out << kSummaryCsvSchema << ',' << s.dataset << ',' << s.player << ',' << s.rule
      << ',' << buf << ',' << s.n_seeds << ',' << s.n_puzzles << '\n';
}

// Mean score of one (player label, rule) series, or NaN when absent.
inline double SummaryMean(const std::vector<ScoreSummary>& summary,
                          const std::string& player, const std::string& rule) {
  for (const auto& s : summary) {
    if (s.player == player && s.rule == rule) return s.mean;
  }
  return std::nan("");
}

}  // namespace teamzero

#endif  // TEAMZERO_PUZZLE_EVAL_HPP_
