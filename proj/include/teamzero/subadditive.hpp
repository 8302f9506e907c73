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

// Sub-additive planning: every player searches the same position, then one
// player is chosen from the search statistics and plays its own most-visited
// move. Max-over-latents is the oracle that credits the team whenever any
// player is right.

#ifndef TEAMZERO_SUBADDITIVE_HPP_
#define TEAMZERO_SUBADDITIVE_HPP_

#include <algorithm>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamzero/diversity.hpp"
#include "teamzero/search.hpp"

namespace teamzero {

enum class SelectionRule { kVisit, kValue, kLcb, kGap };

inline std::string SelectionRuleName(SelectionRule r) {
  switch (r) {
    case SelectionRule::kVisit: return "VISIT";
    case SelectionRule::kValue: return "VALUE";
    case SelectionRule::kLcb: return "LCB";
    case SelectionRule::kGap: return "GAP";
  }
  return "VISIT";
}

inline SelectionRule ParseSelectionRule(const std::string& s) {
  for (auto r : {SelectionRule::kVisit, SelectionRule::kValue,
                 SelectionRule::kLcb, SelectionRule::kGap}) {
    if (SelectionRuleName(r) == s) return r;
  }
  throw ConfigError("unknown selection rule '" + s + "'");
}

// Root statistics of one player: N, Q, U per legal move.
struct PlayerStats {
  std::vector<RootMoveStats> moves;

  static PlayerStats From(const SearchResult& r) { return PlayerStats{r.moves}; }

  // Most-visited move; ties toward the earlier entry.
  const RootMoveStats& Best() const {
    if (moves.empty()) throw std::invalid_argument("player has no moves");
    std::size_t best = 0;
    for (std::size_t k = 1; k < moves.size(); ++k) {
      if (moves[k].n > moves[best].n) best = k;
    }
    return moves[best];
  }

  int MaxVisits() const { return Best().n; }

  // V(s) = max_a Q(s, a) over visited moves.
  double Value() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& m : moves) {
      if (m.n > 0) v = std::max(v, m.q);
    }
    return v;
  }

  double MaxLcb() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& m : moves) v = std::max(v, m.q - m.u);
    return v;
  }

  double MaxU() const {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& m : moves) v = std::max(v, m.u);
    return v;
  }
};

struct Selection {
  int player = 0;
  MoveId move = 0;
  double q = 0.0;  // root Q of the selected move
};

// `gap` overrides Gap(s) = max_{a,j} U^j(s,a) for the GAP rule when >= 0.
inline Selection SubadditiveSelect(std::span<const PlayerStats> stats,
                                   SelectionRule rule, double gap = -1.0) {
  if (stats.empty()) throw std::invalid_argument("no player statistics");
  const int n = static_cast<int>(stats.size());
  auto argmax = [&](auto key) {
    int best = 0;
    for (int j = 1; j < n; ++j) {
      if (key(stats[j]) > key(stats[best])) best = j;
    }
    return best;
  };
  int chosen = 0;
  switch (rule) {
    case SelectionRule::kVisit:
      chosen = argmax([](const PlayerStats& s) { return s.MaxVisits(); });
      break;
    case SelectionRule::kValue:
      chosen = argmax([](const PlayerStats& s) { return s.Value(); });
      break;
    case SelectionRule::kLcb:
      chosen = argmax([](const PlayerStats& s) { return s.MaxLcb(); });
      break;
    case SelectionRule::kGap: {
      double width = gap;
      if (width < 0.0) {
        width = -std::numeric_limits<double>::infinity();
        for (const auto& s : stats) width = std::max(width, s.MaxU());
      }
      double top = -std::numeric_limits<double>::infinity();
      for (const auto& s : stats) top = std::max(top, s.Value());
      chosen = -1;
      for (int j = 0; j < n; ++j) {
        const double v = stats[j].Value();
        if (v < top - width) continue;
        if (chosen < 0 || v < stats[chosen].Value()) chosen = j;
      }
      break;
    }
  }
  const RootMoveStats& m = stats[chosen].Best();
  return Selection{chosen, m.move, m.q};
}

inline double MaxOverLatents(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("no scores");
  return *std::max_element(scores.begin(), scores.end());
}

}  // namespace teamzero

#endif  // TEAMZERO_SUBADDITIVE_HPP_
