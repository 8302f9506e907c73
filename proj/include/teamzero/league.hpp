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

// Matchmaking for the team: who plays whom, with which colour, and whose
// experience is kept.
//
// A matchup (i, j, seat) is drawn as
//   i ~ uniform(team), seat ~ uniform{first, second}, j ~ sigma_seat[i],
// where sigma_seat is a row-stochastic interaction graph built from the
// empirical payoffs recorded for that seat.

#ifndef TEAMZERO_LEAGUE_HPP_
#define TEAMZERO_LEAGUE_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamzero/diversity.hpp"
#include "teamzero/nash.hpp"
#include "teamzero/random.hpp"

namespace teamzero {

enum class MatchmakerKind {
  kSelfPlay,
  kUniform,
  kPsroNash,
  kPsroRectified,
  kFictitiousPlay,
  kPsroCycle,
};

inline std::string MatchmakerName(MatchmakerKind k) {
  switch (k) {
    case MatchmakerKind::kSelfPlay: return "selfplay";
    case MatchmakerKind::kUniform: return "uniform";
    case MatchmakerKind::kPsroNash: return "psro_nash";
    case MatchmakerKind::kPsroRectified: return "psro_rectified";
    case MatchmakerKind::kFictitiousPlay: return "fictitious_play";
    case MatchmakerKind::kPsroCycle: return "psro_cycle";
  }
  return "unknown";
}

inline MatchmakerKind ParseMatchmaker(const std::string& s) {
  for (auto k : {MatchmakerKind::kSelfPlay, MatchmakerKind::kUniform,
                 MatchmakerKind::kPsroNash, MatchmakerKind::kPsroRectified,
                 MatchmakerKind::kFictitiousPlay, MatchmakerKind::kPsroCycle}) {
    if (MatchmakerName(k) == s) return k;
  }
  throw ConfigError("unknown matchmaker '" + s + "'");
}

// Whether the PSRO lower-triangular restriction applies to a kind.
inline bool IsLowerTriangularKind(MatchmakerKind k) {
  return k == MatchmakerKind::kPsroNash || k == MatchmakerKind::kPsroRectified ||
         k == MatchmakerKind::kFictitiousPlay;
}

// Seat of the exploiter: moving first (P1) or second (P2).
enum class Seat : int { kFirst = 0, kSecond = 1 };

inline Seat OtherSeat(Seat s) {
  return s == Seat::kFirst ? Seat::kSecond : Seat::kFirst;
}

struct Matchup {
  int exploiter = 0;
  int exploitee = 0;
  Seat seat = Seat::kFirst;
};

struct ResultCounts {
  std::int64_t wins = 0;
  std::int64_t draws = 0;
  std::int64_t losses = 0;
  std::int64_t games = 0;

  // Draws count half.
  double WinRate() const {
    return games == 0 ? 0.5 : (wins + 0.5 * draws) / static_cast<double>(games);
  }
  friend bool operator==(const ResultCounts&, const ResultCounts&) = default;
};

// Cumulative results per exploiter seat: cell (seat, i, j) holds player i's
// record when i was the exploiter sitting in `seat` against j.
class PayoffTable {
 public:
  explicit PayoffTable(int n_players = 1)
      : n_(n_players),
        cells_{std::vector<ResultCounts>(n_players * n_players),
               std::vector<ResultCounts>(n_players * n_players)} {}

  PayoffTable(const PayoffTable& other) {
    std::lock_guard<std::mutex> lock(other.mu_);
    n_ = other.n_;
    cells_ = other.cells_;
  }
  PayoffTable& operator=(const PayoffTable& other) {
    if (this == &other) return *this;
    PayoffTable copy(other);
    std::lock_guard<std::mutex> lock(mu_);
    n_ = copy.n_;
    cells_ = std::move(copy.cells_);
    return *this;
  }

  int n_players() const { return n_; }

  ResultCounts At(Seat seat, int i, int j) const {
    std::lock_guard<std::mutex> lock(mu_);
    return cells_[static_cast<int>(seat)][i * n_ + j];
  }

  // `first_mover_z` is the game result from the first mover's perspective.
  void Record(const Matchup& m, int first_mover_z) {
    const int z = m.seat == Seat::kFirst ? first_mover_z : -first_mover_z;
    std::lock_guard<std::mutex> lock(mu_);
    ResultCounts& c =
        cells_[static_cast<int>(m.seat)][m.exploiter * n_ + m.exploitee];
    if (z > 0) ++c.wins;
    else if (z < 0) ++c.losses;
    else ++c.draws;
    ++c.games;
  }

  // Mean result of a playing `seat` against b, pooling games where a was the
  // exploiter with games where b was the exploiter in the other seat. Cells
  // without games count as draws.
  double Payoff(Seat seat, int a, int b) const {
    std::lock_guard<std::mutex> lock(mu_);
    const ResultCounts& own = cells_[static_cast<int>(seat)][a * n_ + b];
    const ResultCounts& mirror =
        cells_[static_cast<int>(OtherSeat(seat))][b * n_ + a];
    const double games = static_cast<double>(own.games + mirror.games);
    if (games == 0.0) return 0.0;
    const double net = static_cast<double>(own.wins - own.losses) +
                       static_cast<double>(mirror.losses - mirror.wins);
    return net / games;
  }

  // Seat-averaged payoff of a against b.
  double AveragePayoff(int a, int b) const {
    return 0.5 * (Payoff(Seat::kFirst, a, b) + Payoff(Seat::kSecond, a, b));
  }

  void Set(Seat seat, int i, int j, const ResultCounts& c) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) {
      throw std::out_of_range("payoff cell out of range");
    }
    std::lock_guard<std::mutex> lock(mu_);
    cells_[static_cast<int>(seat)][i * n_ + j] = c;
  }

  // CSV: schema,seat,i,j,wins,draws,losses,games
  void WriteCsv(std::ostream& out) const {
    std::lock_guard<std::mutex> lock(mu_);
    out << "schema,seat,i,j,wins,draws,losses,games\n";
    for (int s = 0; s < 2; ++s) {
      for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
          const ResultCounts& c = cells_[s][i * n_ + j];
          out << "payoff.v1," << (s == 0 ? "first" : "second") << ',' << i
              << ',' << j << ','
              << c.wins << ',' << c.draws << ',' << c.losses << ',' << c.games
              << '\n';
        }
      }
    }
  }

 private:
  mutable std::mutex mu_;
  int n_ = 1;
  std::array<std::vector<ResultCounts>, 2> cells_;
};

struct InteractionGraph {
  Seat seat = Seat::kFirst;
  DenseMatrix sigma;  // row i: opponent mixture for exploiter i

  // CSV: schema,row,j0,...,j{N-1}
  void WriteCsv(std::ostream& out) const {
    out << "schema,row";
    for (std::size_t j = 0; j < sigma.size(); ++j) out << ",j" << j;
    out << '\n';
    char buf[40];
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      out << "graph.v1," << i;
      for (double x : sigma[i]) {
        std::snprintf(buf, sizeof(buf), ",%.17g", x);
        out << buf;
      }
      out << '\n';
    }
  }
};

using GraphPair = std::array<InteractionGraph, 2>;

inline double RowSum(const std::vector<double>& row) {
  double s = 0.0;
  for (double x : row) s += x;
  return s;
}

namespace internal {

// Meta-game among players {0..k} with the row player in `seat`.
inline DenseMatrix SubGame(const PayoffTable& table, Seat seat, int k) {
  DenseMatrix m(k + 1, std::vector<double>(k + 1, 0.0));
  for (int a = 0; a <= k; ++a) {
    for (int b = 0; b <= k; ++b) m[a][b] = table.Payoff(seat, a, b);
  }
  return m;
}

// Opponent mixture for an exploiter in `seat` facing the Nash population of
// {0..k}: the column player's equilibrium strategy, padded to n entries.
inline std::vector<double> NashOpponents(const PayoffTable& table, Seat seat,
                                         int k, int n) {
  const NashSolution sol = SolveNash(SubGame(table, seat, k));
  std::vector<double> row(n, 0.0);
  for (int j = 0; j <= k; ++j) row[j] = sol.col[j];
  return row;
}

}  // namespace internal

inline GraphPair BuildGraphs(MatchmakerKind kind, const PayoffTable& table,
                             int n_players) {
  if (n_players < 1) throw std::invalid_argument("empty population");
  if (table.n_players() != n_players) {
    throw std::invalid_argument("payoff table size mismatch");
  }
  const int n = n_players;
  GraphPair graphs;
  for (int s = 0; s < 2; ++s) {
    const Seat seat = static_cast<Seat>(s);
    InteractionGraph& g = graphs[s];
    g.seat = seat;
    g.sigma.assign(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      auto& row = g.sigma[i];
      switch (kind) {
        case MatchmakerKind::kSelfPlay:
          row[i] = 1.0;
          break;
        case MatchmakerKind::kUniform:
          for (int j = 0; j < n; ++j) row[j] = 1.0 / n;
          break;
        case MatchmakerKind::kFictitiousPlay:
          for (int j = 0; j <= i; ++j) row[j] = 1.0 / (i + 1);
          break;
        case MatchmakerKind::kPsroNash:
          row = internal::NashOpponents(table, seat, i, n);
          break;
        case MatchmakerKind::kPsroRectified: {
          row = internal::NashOpponents(table, seat, i, n);
          std::vector<double> kept(n, 0.0);
          int n_kept = 0;
          for (int j = 0; j <= i; ++j) {
            // Keep opponents that i beats or ties on average.
            if (table.AveragePayoff(i, j) >= 0.0) {
              kept[j] = row[j];
              ++n_kept;
            }
          }
          double mass = RowSum(kept);
          if (mass <= 0.0) {
            for (int j = 0; j <= i; ++j) {
              if (table.AveragePayoff(i, j) >= 0.0) kept[j] = 1.0 / n_kept;
            }
            mass = 1.0;
          }
          for (int j = 0; j < n; ++j) row[j] = kept[j] / mass;
          break;
        }
        case MatchmakerKind::kPsroCycle:
          if (n == 1) {
            row[0] = 1.0;
          } else if (i < n - 1) {
            row[(i + 1) % (n - 1)] = 1.0;
          } else {
            row = internal::NashOpponents(table, seat, n - 1, n);
          }
          break;
      }
    }
  }
  return graphs;
}

inline Matchup SampleMatchup(MatchmakerKind kind, const GraphPair& graphs,
                             int n_players, Rng& rng) {
  Matchup m;
  m.exploiter = static_cast<int>(rng.UniformInt(n_players));
  m.seat = static_cast<Seat>(rng.UniformInt(2));
  const auto& row = graphs[static_cast<int>(m.seat)].sigma.at(m.exploiter);
  if (static_cast<int>(row.size()) != n_players ||
      std::abs(RowSum(row) - 1.0) > 1e-9) {
    throw std::invalid_argument("interaction graph row " +
                                std::to_string(m.exploiter) +
                                " is not a distribution");
  }
  if (kind == MatchmakerKind::kSelfPlay) {
    m.exploitee = m.exploiter;
  } else {
    m.exploitee = static_cast<int>(rng.Categorical(row));
  }
  return m;
}

// Keeps the exploiter's own steps; self-play keeps both seats.
inline std::vector<TrajectoryStep> FilterExperience(
    const Matchup& m, const std::vector<TrajectoryStep>& steps) {
  if (m.exploiter == m.exploitee) return steps;
  const Player exploiter_side =
      m.seat == Seat::kFirst ? Player::kP1 : Player::kP2;
  std::vector<TrajectoryStep> kept;
  for (const auto& s : steps) {
    if (s.side == exploiter_side) kept.push_back(s);
  }
  return kept;
}

}  // namespace teamzero

#endif  // TEAMZERO_LEAGUE_HPP_
