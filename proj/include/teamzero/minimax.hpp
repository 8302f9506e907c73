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

// Exact game-theoretic solver for the bundled games.

#ifndef TEAMZERO_MINIMAX_HPP_
#define TEAMZERO_MINIMAX_HPP_

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "teamzero/game.hpp"

namespace teamzero {

struct MinimaxSolution {
  int value = 0;                     // for the player to move
  std::vector<MoveId> optimal_moves;  // ascending; empty for terminal states
};

// Negamax over the full game tree with a transposition table of exact
// values. The only pruning is the cut on a proven win, which keeps every
// stored value exact. Not thread-safe: use one solver per worker, or fill a
// solver up front and share it through the const interface.
class MinimaxSolver {
 public:
  // Value of `state` for its player to move, in {-1, 0, +1}.
  int Value(const GameState& state) {
    if (auto outcome = state.TerminalOutcome()) {
      return outcome->For(state.to_move());
    }
    const std::uint64_t key = state.BoardKey();
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    int best = -2;
    for (MoveId m : state.LegalMoves()) {
      const int v = -Value(state.ApplyMove(m));
      if (v > best) best = v;
      if (best == 1) break;
    }
    table_.emplace(key, static_cast<std::int8_t>(best));
    return best;
  }

  MinimaxSolution Solve(const GameState& state) {
    MinimaxSolution out;
    out.value = Value(state);
    if (state.IsTerminal()) return out;
    for (MoveId m : state.LegalMoves()) {
      if (-Value(state.ApplyMove(m)) == out.value) {
        out.optimal_moves.push_back(m);
      }
    }
    return out;
  }

  // Read-only lookup for states already solved.
  std::optional<int> Find(const GameState& state) const {
    if (auto outcome = state.TerminalOutcome()) {
      return outcome->For(state.to_move());
    }
    auto it = table_.find(state.BoardKey());
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t table_size() const { return table_.size(); }

 private:
  std::unordered_map<std::uint64_t, std::int8_t> table_;
};

// Every position reachable from the initial state (terminal ones included),
// ordered by move count and then by board key. `max_depth` < 0 means no limit;
// otherwise only states with at most that many moves are returned.
inline std::vector<GameState> ReachableStates(const GameSpec& spec,
                                              int max_depth = -1) {
  std::vector<GameState> out;
  std::vector<GameState> frontier{GameState::Initial(spec)};
  for (int depth = 0; !frontier.empty(); ++depth) {
    std::sort(frontier.begin(), frontier.end(),
              [](const GameState& a, const GameState& b) {
                return a.BoardKey() < b.BoardKey();
              });
    std::vector<GameState> next;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& s : frontier) {
      out.push_back(s);
      if (max_depth >= 0 && depth >= max_depth) continue;
      for (MoveId m : s.LegalMoves()) {
        GameState child = s.ApplyMove(m);
        if (seen.insert(child.BoardKey()).second) {
          next.push_back(std::move(child));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace teamzero

#endif  // TEAMZERO_MINIMAX_HPP_
