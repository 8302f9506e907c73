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

// Per-player feature occupancies measured from fresh greedy self-play, with
// the across-player spread and the mean-subtracted table. Like psi, a
// player's occupancy is the average over games of the per-game mean of phi.

#ifndef TEAMZERO_OCCUPANCY_HPP_
#define TEAMZERO_OCCUPANCY_HPP_

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "teamzero/diversity.hpp"
#include "teamzero/encoding.hpp"
#include "teamzero/random.hpp"
#include "teamzero/search.hpp"

namespace teamzero {

struct OccupancyReport {
  int n_players = 0;
  int feature_dim = 0;
  std::vector<std::vector<double>> mean;      // [player][feature]
  std::vector<double> std_dev;                // [feature], population std
  std::vector<std::vector<double>> centered;  // mean minus across-player mean
};

// `search.diversity` selects whether the players search with their intrinsic
// reward, as during training; `team` must then be set.
inline OccupancyReport MeasureOccupancy(const Evaluator& evaluator,
                                        const TeamState* team,
                                        const GameSpec& spec,
                                        const SearchConfig& search, int n_games,
                                        std::uint64_t seed) {
  OccupancyReport r;
  r.n_players = evaluator.n_players();
  r.feature_dim = spec.feature_dim();
  const int d = r.feature_dim;
  r.mean.assign(r.n_players, std::vector<double>(d, 0.0));
  for (int i = 0; i < r.n_players; ++i) {
    for (int g = 0; g < n_games; ++g) {
      Rng rng(DeriveSeed(DeriveSeed(seed, i), g));
      SearchConfig cfg = search;
      if (team) cfg.lambda = team->lambda.at(i);
      std::vector<double> game_sum(d, 0.0);
      int steps = 0;
      GameState s = GameState::Initial(spec);
      while (!s.IsTerminal()) {
        const SearchResult res = RunSearch(s, i, evaluator, team, cfg, rng);
        const MoveId m = SelectGreedy(res, rng);
        const FeatureVector phi = FeatureMap(s, m);
        for (int k = 0; k < d; ++k) game_sum[k] += phi[k];
        ++steps;
        s = s.ApplyMove(m);
      }
      for (int k = 0; k < d; ++k) r.mean[i][k] += game_sum[k] / steps / n_games;
    }
  }
  r.std_dev.assign(d, 0.0);
  r.centered = r.mean;
  for (int k = 0; k < d; ++k) {
    double mu = 0.0;
    for (int i = 0; i < r.n_players; ++i) mu += r.mean[i][k];
    mu /= r.n_players;
    double var = 0.0;
    for (int i = 0; i < r.n_players; ++i) {
      r.centered[i][k] = r.mean[i][k] - mu;
      var += r.centered[i][k] * r.centered[i][k];
    }
    r.std_dev[k] = std::sqrt(var / r.n_players);
  }
  return r;
}

// CSV: schema,player,feature,value  (n_players x D rows)
inline void WriteOccupancyTable(std::ostream& out,
                                const std::vector<std::vector<double>>& table,
                                const char* schema) {
  out << "schema,player,feature,value\n";
  char buf[40];
  for (std::size_t i = 0; i < table.size(); ++i) {
    for (std::size_t k = 0; k < table[i].size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.10g", table[i][k]);
      out << schema << ',' << i << ',' << k << ',' << buf << '\n';
    }
  }
}

// CSV: schema,feature,std
inline void WriteOccupancyStd(std::ostream& out, const OccupancyReport& r) {
  out << "schema,feature,std\n";
  char buf[40];
  for (std::size_t k = 0; k < r.std_dev.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.10g", r.std_dev[k]);
    out << "occupancy_std.v1," << k << ',' << buf << '\n';
  }
}

}  // namespace teamzero

#endif  // TEAMZERO_OCCUPANCY_HPP_
