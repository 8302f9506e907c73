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

// Head-to-head matches between a team and an opponent from a set of openings,
// Elo conversion, and leave-one-out opening specialisation.

#ifndef TEAMZERO_MATCH_HPP_
#define TEAMZERO_MATCH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamzero/minimax.hpp"
#include "teamzero/puzzles.hpp"
#include "teamzero/random.hpp"
#include "teamzero/search.hpp"

namespace teamzero {

// 400 log10(w / (1 - w)).
inline double WinrateToElo(double w) {
  if (!(w > 0.0 && w < 1.0)) {
    throw std::out_of_range("win rate must lie strictly inside (0, 1)");
  }
  return 400.0 * std::log10(w / (1.0 - w));
}

// Mean score in [-1, 1] to a win rate with draws worth half.
inline double ScoreToWinrate(double mean_score) { return (mean_score + 1.0) / 2.0; }

struct Opening {
  GameState position;
  int oracle_value = 0;   // for the player to move
  int line_imbalance = 0; // open-line score of the mover minus the opponent's
};

// Distinct positions after `plies` uniform random moves that are neither
// terminal nor lost for either side, in the order first found.
inline std::vector<Opening> GenerateOpenings(const GameSpec& spec,
                                             MinimaxSolver& solver, int plies,
                                             int count, std::uint64_t seed,
                                             int max_attempts = 100000) {
  if (plies < 0 || count < 1) throw std::invalid_argument("bad opening request");
  Rng rng(DeriveSeed(seed, 0x0BE1));
  std::vector<Opening> out;
  std::set<std::pair<std::uint64_t, int>> seen;
  for (int attempt = 0; attempt < max_attempts &&
                        static_cast<int>(out.size()) < count; ++attempt) {
    GameState s = GameState::Initial(spec);
    for (int k = 0; k < plies && !s.IsTerminal(); ++k) {
      const auto legal = s.LegalMoves();
      s = s.ApplyMove(legal[rng.UniformInt(legal.size())]);
    }
    if (s.IsTerminal()) continue;
    if (!seen.insert({s.BoardKey(), s.move_count()}).second) continue;
    const int v = solver.Value(s);
    if (v != 0) continue;
    out.push_back(Opening{s, v,
                          OpenLineScore(s, s.to_move()) -
                              OpenLineScore(s, Opponent(s.to_move()))});
  }
  return out;
}

// Greedy play (most visits, random ties) between two latent-conditioned
// evaluators. Returns the outcome from P1's perspective.
inline int PlayGreedyGame(const Evaluator& p1, int p1_latent, const Evaluator& p2,
                          int p2_latent, const GameState& start,
                          const SearchConfig& search, Rng& rng) {
  GameState s = start;
  while (!s.IsTerminal()) {
    const bool first = s.to_move() == Player::kP1;
    const SearchResult r = RunSearch(s, first ? p1_latent : p2_latent,
                                     first ? p1 : p2, nullptr, search, rng);
    s = s.ApplyMove(SelectGreedy(r, rng));
  }
  return s.TerminalOutcome()->z;
}

enum class Color { kFirst = 0, kSecond = 1 };

struct MatchRecord {
  int opening = 0;
  Color color = Color::kFirst;  // the team player's seat
  int seed = 0;
  int player = 0;               // team latent
  int score = 0;                // team player's result in {-1, 0, 1}
};

inline constexpr const char* kMatchCsvHeader =
    "schema,opening,color,seed,player,score";
inline constexpr const char* kMatchCsvSchema = "matches.v1";

inline void WriteMatchRow(std::ostream& out, const MatchRecord& r) {
  out << kMatchCsvSchema << ',' << r.opening << ','
      << (r.color == Color::kFirst ? "first" : "second") << ',' << r.seed << ','
      << r.player << ',' << r.score << '\n';
}

struct MatchConfig {
  SearchConfig search;
  std::vector<int> players;  // team latents; empty means all
  int opponent_latent = 0;
  int n_seeds = 2;
  std::uint64_t seed = 0;
};

// One record per (opening, color, seed, player), ordered by opening, then
// seed, player and color.
inline std::vector<MatchRecord> PlayMatch(const Evaluator& team,
                                          const Evaluator& opponent,
                                          const std::vector<Opening>& openings,
                                          const MatchConfig& cfg) {
  std::vector<int> players = cfg.players;
  if (players.empty()) {
    for (int j = 0; j < team.n_players(); ++j) players.push_back(j);
  }
  std::vector<MatchRecord> out;
  for (std::size_t o = 0; o < openings.size(); ++o) {
    if (openings[o].position.IsTerminal()) {
      throw std::invalid_argument("terminal opening");
    }
    for (int seed = 0; seed < cfg.n_seeds; ++seed) {
      for (int j : players) {
        for (Color c : {Color::kFirst, Color::kSecond}) {
          Rng rng(DeriveSeed(DeriveSeed(DeriveSeed(cfg.seed, o), seed),
                             2 * j + static_cast<int>(c)));
          const GameState& start = openings[o].position;
          // "first" means the team moves first from the opening.
          const bool team_is_p1 = (start.to_move() == Player::kP1) ==
                                  (c == Color::kFirst);
          const int z = team_is_p1
                            ? PlayGreedyGame(team, j, opponent, cfg.opponent_latent,
                                             start, cfg.search, rng)
                            : PlayGreedyGame(opponent, cfg.opponent_latent, team, j,
                                             start, cfg.search, rng);
          out.push_back(MatchRecord{static_cast<int>(o), c, seed, j,
                                    team_is_p1 ? z : -z});
        }
      }
    }
  }
  return out;
}

// Dense view: mean over colors of the score, indexed [seed][opening][player].
struct ScoreTable {
  int n_seeds = 0;
  int n_openings = 0;
  std::vector<int> players;
  std::vector<double> values;

  double& at(int s, int o, int p) {
    return values[(static_cast<std::size_t>(s) * n_openings + o) * players.size() + p];
  }
  double at(int s, int o, int p) const {
    return values[(static_cast<std::size_t>(s) * n_openings + o) * players.size() + p];
  }

  static ScoreTable From(const std::vector<MatchRecord>& records) {
    ScoreTable t;
    std::set<int> players;
    for (const auto& r : records) {
      t.n_seeds = std::max(t.n_seeds, r.seed + 1);
      t.n_openings = std::max(t.n_openings, r.opening + 1);
      players.insert(r.player);
    }
    t.players.assign(players.begin(), players.end());
    t.values.assign(static_cast<std::size_t>(t.n_seeds) * t.n_openings *
                        t.players.size(), 0.0);
    std::vector<int> counts(t.values.size(), 0);
    for (const auto& r : records) {
      const int p = static_cast<int>(
          std::find(t.players.begin(), t.players.end(), r.player) - t.players.begin());
      const std::size_t k =
          (static_cast<std::size_t>(r.seed) * t.n_openings + r.opening) *
              t.players.size() + p;
      t.values[k] += r.score;
      counts[k] += 1;
    }
    for (std::size_t k = 0; k < t.values.size(); ++k) {
      if (counts[k] > 0) t.values[k] /= counts[k];
    }
    return t;
  }
};

struct LeaveOneOutResult {
  // choice[s][o]: table player index chosen for opening o when seed s is held out
  std::vector<std::vector<int>> choice;
  double held_out_score = 0.0;  // mean over folds and openings
};

// For each held-out seed and opening, pick the player with the best mean
// score over the other seeds and report its held-out score. With gap >= 0,
// the candidates are those within `gap` of the best and the lowest of them is
// chosen. Ties go to the smaller player index.
inline LeaveOneOutResult LeaveOneOut(const ScoreTable& t, double gap = -1.0) {
  if (t.n_seeds < 2) throw std::invalid_argument("leave-one-out needs >= 2 seeds");
  LeaveOneOutResult r;
  r.choice.assign(t.n_seeds, std::vector<int>(t.n_openings, 0));
  const int np = static_cast<int>(t.players.size());
  double total = 0.0;
  for (int s = 0; s < t.n_seeds; ++s) {
    for (int o = 0; o < t.n_openings; ++o) {
      std::vector<double> mean(np, 0.0);
      for (int p = 0; p < np; ++p) {
        for (int q = 0; q < t.n_seeds; ++q) {
          if (q != s) mean[p] += t.at(q, o, p);
        }
        mean[p] /= (t.n_seeds - 1);
      }
      int pick = 0;
      for (int p = 1; p < np; ++p) {
        if (mean[p] > mean[pick]) pick = p;
      }
      if (gap >= 0.0) {
        const double top = mean[pick];
        for (int p = 0; p < np; ++p) {
          if (mean[p] >= top - gap && mean[p] < mean[pick]) pick = p;
        }
      }
      r.choice[s][o] = pick;
      total += t.at(s, o, pick);
    }
  }
  r.held_out_score = total / (t.n_seeds * t.n_openings);
  return r;
}

struct MatchSummaryRow {
  std::string column;  // "player_<j>", "subadditive", "max_over_latents"
  bool available = true;
  double mean_score = 0.0;
  double winrate = 0.5;
  double elo = 0.0;  // +-inf at win rate 0 or 1
};

inline constexpr const char* kMatchSummaryHeader =
    "schema,column,available,mean_score,winrate,elo";
inline constexpr const char* kMatchSummarySchema = "match_summary.v1";

inline double SafeElo(double w) {
  if (w <= 0.0) return -std::numeric_limits<double>::infinity();
  if (w >= 1.0) return std::numeric_limits<double>::infinity();
  return WinrateToElo(w);
}

inline std::vector<MatchSummaryRow> SummarizeMatch(const std::vector<MatchRecord>& records,
                                                   double loo_gap = -1.0) {
  const ScoreTable t = ScoreTable::From(records);
  std::vector<MatchSummaryRow> out;
  auto make = [](const std::string& col, double mean) {
    MatchSummaryRow r;
    r.column = col;
    r.mean_score = mean;
    r.winrate = ScoreToWinrate(mean);
    r.elo = SafeElo(r.winrate);
    return r;
  };
  const int np = static_cast<int>(t.players.size());
  const double cells = static_cast<double>(t.n_seeds) * t.n_openings;
  for (int p = 0; p < np; ++p) {
    double sum = 0.0;
    for (int s = 0; s < t.n_seeds; ++s) {
      for (int o = 0; o < t.n_openings; ++o) sum += t.at(s, o, p);
    }
    out.push_back(make("player_" + std::to_string(t.players[p]), sum / cells));
  }
  if (t.n_seeds >= 2) {
    out.push_back(make("subadditive", LeaveOneOut(t, loo_gap).held_out_score));
  } else {
    MatchSummaryRow r;
    r.column = "subadditive";
    r.available = false;
    out.push_back(r);
  }
  double best = 0.0;
  for (int s = 0; s < t.n_seeds; ++s) {
    for (int o = 0; o < t.n_openings; ++o) {
      double m = -1.0;
      for (int p = 0; p < np; ++p) m = std::max(m, t.at(s, o, p));
      best += m;
    }
  }
  out.push_back(make("max_over_latents", best / cells));
  return out;
}

inline void WriteMatchSummaryRow(std::ostream& out, const MatchSummaryRow& r) {
  out << kMatchSummarySchema << ',' << r.column << ',' << (r.available ? 1 : 0);
  if (!r.available) {
    out << ",NA,NA,NA\n";
    return;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.3f", r.mean_score, r.winrate, r.elo);
  out << buf << '\n';
}

}  // namespace teamzero

#endif  // TEAMZERO_MATCH_HPP_
