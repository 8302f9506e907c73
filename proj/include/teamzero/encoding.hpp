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

#ifndef TEAMZERO_ENCODING_HPP_
#define TEAMZERO_ENCODING_HPP_

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamzero/game.hpp"
#include "teamzero/random.hpp"

namespace teamzero {

// Occupancy of the board reached by playing `move` from `state`: one block of
// num_cells indicators for P1 pieces followed by one block for P2 pieces.
// Side to move, move counters and history are deliberately absent.
inline FeatureVector FeatureMap(const GameState& state, MoveId move) {
  if (!state.IsLegal(move)) {
    throw IllegalMoveError("feature map of illegal move " +
                           std::to_string(move));
  }
  const GameSpec& spec = state.spec();
  const int cells = spec.num_cells();
  FeatureVector phi(spec.feature_dim(), 0.0);
  for (int i = 0; i < cells; ++i) {
    if (state.cell(i) == Cell::kP1) phi[i] = 1.0;
    if (state.cell(i) == Cell::kP2) phi[cells + i] = 1.0;
  }
  const int target = state.TargetCell(move);
  phi[(state.to_move() == Player::kP1 ? 0 : cells) + target] = 1.0;
  return phi;
}

// Evaluator input: a stack of num_planes planes of num_cells values each,
// flattened plane-major.
//
//   plane 0            P1 pieces on the current board
//   plane 1            P2 pieces on the current board
//   plane 2            all ones when P1 is to move, zeros otherwise
//   planes 3..3+2H-1   (P1, P2) planes of the k-th previous board, k = 1..H;
//                      zero-filled when fewer than k boards are available
//   last n_players     one-hot latent planes; plane `latent` is all ones
struct PlaneStack {
  int num_planes = 0;
  int plane_size = 0;
  int first_history_plane = 3;
  int num_history_planes = 0;
  int first_latent_plane = 0;
  std::vector<double> values;

  std::span<double> plane(int p) {
    return {values.data() + p * plane_size, static_cast<std::size_t>(plane_size)};
  }
  std::span<const double> plane(int p) const {
    return {values.data() + p * plane_size, static_cast<std::size_t>(plane_size)};
  }
};

inline PlaneStack EncodePlanes(const GameState& state, int latent,
                               int n_players) {
  if (n_players < 1) throw std::invalid_argument("n_players must be >= 1");
  if (latent < 0 || latent >= n_players) {
    throw std::out_of_range("latent " + std::to_string(latent) +
                            " out of range for team of " +
                            std::to_string(n_players));
  }
  const GameSpec& spec = state.spec();
  const int cells = spec.num_cells();
  PlaneStack out;
  out.num_planes = spec.num_planes(n_players);
  out.plane_size = cells;
  out.num_history_planes = 2 * spec.history_length;
  out.first_latent_plane = spec.num_board_planes();
  out.values.assign(static_cast<std::size_t>(out.num_planes) * cells, 0.0);

  auto write_board = [&](const Board& board, int p1_plane) {
    double* a = out.plane(p1_plane).data();
    double* b = out.plane(p1_plane + 1).data();
    for (int i = 0; i < cells; ++i) {
      a[i] = board[i] == Cell::kP1 ? 1.0 : 0.0;
      b[i] = board[i] == Cell::kP2 ? 1.0 : 0.0;
    }
  };
  write_board(state.board(), 0);
  if (state.to_move() == Player::kP1) {
    double* side = out.plane(2).data();
    for (int i = 0; i < cells; ++i) side[i] = 1.0;
  }
  const auto& history = state.history();
  for (int k = 0; k < spec.history_length; ++k) {
    if (k < static_cast<int>(history.size())) {
      write_board(history[k], out.first_history_plane + 2 * k);
    }
  }
  double* lat = out.plane(out.first_latent_plane + latent).data();
  for (int i = 0; i < cells; ++i) lat[i] = 1.0;
  return out;
}

// Zeroes each history plane independently with probability `p`; the current
// board, side-to-move and latent planes are untouched. No-op without history.
inline void ApplyHistoryDropout(PlaneStack& planes, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("dropout probability must lie in [0, 1]");
  }
  for (int h = 0; h < planes.num_history_planes; ++h) {
    if (rng.Bernoulli(p)) {
      auto plane = planes.plane(planes.first_history_plane + h);
      std::fill(plane.begin(), plane.end(), 0.0);
    }
  }
}

}  // namespace teamzero

#endif  // TEAMZERO_ENCODING_HPP_
