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

// Behavioural diversity across a latent-conditioned team.
//
// Each player i summarizes its behaviour by expected features psi_i, the
// mean of phi(s, a) over its own state-action occupancy. Players are pushed
// apart (or pulled together) around a target distance l0 to their nearest
// teammate by the utility
//
//   U = sum_i (1 - lambda_i) (0.5 d_i^2 - 0.2 d_i^5 / l0^3),
//   d_i = |psi_i - psi_{j*(i)}|,
//
// whose gradient with respect to psi_i, projected on phi(s, a), is the
// per-step intrinsic reward
//
//   r_d(s, a) = (1 - (d_i / l0)^3) phi(s, a) . (psi_i - psi_{j*(i)}).

#ifndef TEAMZERO_DIVERSITY_HPP_
#define TEAMZERO_DIVERSITY_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamzero/game.hpp"

namespace teamzero {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline double SquaredDistance(std::span<const double> a,
                              std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

struct TeamState {
  int n_players = 1;
  std::vector<double> lambda;             // lambda[0] == 1
  std::vector<std::vector<double>> psi;   // n_players x D
  double l0 = 1.0;
  double beta = 0.99;                     // EMA decay for psi

  // Default team: lambda_0 = 1, lambda_i = `lambda` otherwise, psi = 0.
  static TeamState Make(int n_players, int feature_dim, double lambda,
                        double l0, double beta) {
    if (n_players < 1) throw ConfigError("n_players must be >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw ConfigError("lambda must lie in [0, 1]");
    }
    if (!(l0 > 0.0)) throw ConfigError("l0 must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
    TeamState t;
    t.n_players = n_players;
    t.lambda.assign(n_players, lambda);
    t.lambda[0] = 1.0;
    t.psi.assign(n_players, std::vector<double>(feature_dim, 0.0));
    t.l0 = l0;
    t.beta = beta;
    return t;
  }

  int feature_dim() const { return psi.empty() ? 0 : static_cast<int>(psi[0].size()); }
};

// Default l0 scales with the feature dimension so that the equilibrium
// distance is reachable with binary occupancy features.
inline double DefaultL0(int feature_dim) {
  return 0.3 * std::sqrt(static_cast<double>(feature_dim));
}

struct TrajectoryStep {
  GameState state;
  MoveId move = 0;
  int latent = 0;                    // latent of the team player that acted
  Player side = Player::kP1;         // seat that acted
  FeatureVector phi;
  double r_d = 0.0;                  // intrinsic reward of the acting player
  double root_v_d = 0.0;             // v_d of the search root (bootstrap)
  double root_value = 0.0;           // post-search root value, mover view
  std::vector<double> pi;            // search visit distribution
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  Outcome outcome;
  GameState final_state{GameSpec::Get(GameKind::kTicTacToe)};
};

// psi_i <- beta psi_i + (1 - beta) mean(phi over player i's own steps).
// Steps are attributed by latent, so in self-play (both seats share a latent)
// both sides' steps count. No-op when player i never acted.
inline void UpdateOccupancy(TeamState& team, const Trajectory& trajectory,
                            int player) {
  const int dim = team.feature_dim();
  std::vector<double> mean(dim, 0.0);
  int count = 0;
  for (const auto& step : trajectory.steps) {
    if (step.latent != player) continue;
    if (static_cast<int>(step.phi.size()) != dim) {
      throw std::invalid_argument("feature dimension mismatch");
    }
    for (int k = 0; k < dim; ++k) mean[k] += step.phi[k];
    ++count;
  }
  if (count == 0) return;
  auto& psi = team.psi.at(player);
  for (int k = 0; k < dim; ++k) {
    psi[k] = team.beta * psi[k] + (1.0 - team.beta) * (mean[k] / count);
  }
}

// argmin_{j != i} |psi_i - psi_j|^2, ties toward the smaller index.
inline int NearestRival(int i, const TeamState& team) {
  if (team.n_players < 2) {
    throw std::invalid_argument("nearest rival needs at least two players");
  }
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < team.n_players; ++j) {
    if (j == i) continue;
    const double d = SquaredDistance(team.psi[i], team.psi[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

// Per-player term 0.5 d^2 - 0.2 d^5 / l0^3.
inline double PairUtility(double d, double l0) {
  return 0.5 * d * d - 0.2 * std::pow(d, 5) / (l0 * l0 * l0);
}

inline double DiversityUtility(const TeamState& team) {
  if (team.n_players < 2) {
    throw std::invalid_argument("diversity utility needs at least two players");
  }
  double total = 0.0;
  for (int i = 0; i < team.n_players; ++i) {
    const int j = NearestRival(i, team);
    const double d = std::sqrt(SquaredDistance(team.psi[i], team.psi[j]));
    total += (1.0 - team.lambda[i]) * PairUtility(d, team.l0);
  }
  return total;
}

inline double IntrinsicReward(std::span<const double> phi,
                              std::span<const double> psi_i,
                              std::span<const double> psi_rival, double l0) {
  if (phi.size() != psi_i.size() || psi_i.size() != psi_rival.size()) {
    throw std::invalid_argument("dimension mismatch");
  }
  const double d = std::sqrt(SquaredDistance(psi_i, psi_rival));
  const double ratio = d / l0;
  const double scale = 1.0 - ratio * ratio * ratio;
  double dot = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    dot += phi[k] * (psi_i[k] - psi_rival[k]);
  }
  return scale * dot;
}

// Intrinsic reward of player i for features phi under the current team state;
// zero for a team of one.
inline double PlayerIntrinsicReward(const TeamState& team, int i,
                                    std::span<const double> phi) {
  if (team.n_players < 2) return 0.0;
  const int j = NearestRival(i, team);
  return IntrinsicReward(phi, team.psi[i], team.psi[j], team.l0);
}

inline double CombinedReward(double r_d, double r_e, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1]");
  }
  return (1.0 - lambda) * r_d + lambda * r_e;
}

// z_d(s_t) = sum_{k=0}^{n_td/2 - 1} r_d(t + 2k) + v_d(t + n_td).
//
// `own_rewards[k]` is the acting player's reward at its k-th own turn from t
// (so the window is own_rewards[0 .. n_td/2 - 1]); `bootstrap` is v_d at
// t + n_td, or nullopt when the game ended before reaching it, in which case
// the sum truncates and the bootstrap is zero.
inline double IntrinsicValueTarget(std::span<const double> own_rewards,
                                   int n_td, std::optional<double> bootstrap) {
  if (n_td <= 0 || n_td % 2 != 0) {
    throw ConfigError("N_TD must be a positive even integer, got " +
                      std::to_string(n_td));
  }
  double z = 0.0;
  const std::size_t window = static_cast<std::size_t>(n_td / 2);
  for (std::size_t k = 0; k < window && k < own_rewards.size(); ++k) {
    z += own_rewards[k];
  }
  return z + bootstrap.value_or(0.0);
}

// Trajectory form: step t must be a turn of the player that acts at t; the
// window follows the same seat every second ply.
inline double IntrinsicValueTarget(const Trajectory& trajectory, std::size_t t,
                                   int n_td) {
  if (n_td <= 0 || n_td % 2 != 0) {
    throw ConfigError("N_TD must be a positive even integer, got " +
                      std::to_string(n_td));
  }
  const auto& steps = trajectory.steps;
  if (t >= steps.size()) throw std::out_of_range("step index out of range");
  std::vector<double> rewards;
  for (std::size_t k = t; k < steps.size() && k < t + n_td; k += 2) {
    rewards.push_back(steps[k].r_d);
  }
  std::optional<double> bootstrap;
  if (t + n_td < steps.size()) bootstrap = steps[t + n_td].root_v_d;
  return IntrinsicValueTarget(rewards, n_td, bootstrap);
}

}  // namespace teamzero

#endif  // TEAMZERO_DIVERSITY_HPP_
