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

// Small two-player zero-sum board games. Both bundled games are k-in-a-row
// games on a rectangular grid; connect-four additionally applies gravity.
//
// Cell indexing is row-major with row 0 first. For gravity games row 0 is the
// bottom row, so a checker dropped into an empty column lands in row 0.

#ifndef TEAMZERO_GAME_HPP_
#define TEAMZERO_GAME_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace teamzero {

inline constexpr int kMaxCells = 20;

enum class Player : std::uint8_t { kP1 = 0, kP2 = 1 };

inline Player Opponent(Player p) {
  return p == Player::kP1 ? Player::kP2 : Player::kP1;
}

enum class Cell : std::int8_t { kEmpty = 0, kP1 = 1, kP2 = 2 };

inline Cell CellOf(Player p) {
  return p == Player::kP1 ? Cell::kP1 : Cell::kP2;
}

using MoveId = int;
using Board = std::array<Cell, kMaxCells>;
using FeatureVector = std::vector<double>;

// Game outcome from P1's perspective.
struct Outcome {
  int z = 0;  // -1, 0 or +1

  Outcome FlipPerspective() const { return Outcome{-z}; }
  int For(Player p) const { return p == Player::kP1 ? z : -z; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

class IllegalMoveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GameKind { kTicTacToe, kConnectFour };

// Immutable description of one game. Obtain instances through Get(), which
// returns references with static lifetime so states can hold a plain pointer.
struct GameSpec {
  GameKind kind;
  std::string id;
  int width = 0;
  int height = 0;
  int connect = 0;
  bool gravity = false;
  int history_length = 0;
  int temperature_cutoff = 0;

  int num_cells() const { return width * height; }
  int num_moves() const { return gravity ? width : num_cells(); }
  int feature_dim() const { return 2 * num_cells(); }
  int max_game_length() const { return num_cells(); }
  // Current board (2) + side to move (1) + history boards (2 each).
  int num_board_planes() const { return 3 + 2 * history_length; }
  int num_planes(int n_players) const {
    return num_board_planes() + n_players;
  }
  const std::vector<std::vector<int>>& lines() const { return lines_; }

  static const GameSpec& Get(GameKind kind, int history_length = 0) {
    static std::mutex mu;
    static std::map<std::pair<GameKind, int>, std::unique_ptr<GameSpec>>
        registry;
    if (history_length < 0) {
      throw std::invalid_argument("history length must be non-negative");
    }
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = registry[{kind, history_length}];
    if (!slot) slot.reset(new GameSpec(Make(kind, history_length)));
    return *slot;
  }

  static const GameSpec& FromId(std::string_view id, int history_length = 0) {
    if (id == "tictactoe") return Get(GameKind::kTicTacToe, history_length);
    if (id == "connect4") return Get(GameKind::kConnectFour, history_length);
    throw ParseError("unknown game id '" + std::string(id) + "'");
  }

 private:
  static GameSpec Make(GameKind kind, int history_length) {
    GameSpec spec;
    spec.kind = kind;
    spec.history_length = history_length;
    if (kind == GameKind::kTicTacToe) {
      spec.id = "tictactoe";
      spec.width = 3;
      spec.height = 3;
      spec.connect = 3;
      spec.gravity = false;
      spec.temperature_cutoff = 6;
    } else {
      spec.id = "connect4";
      spec.width = 5;
      spec.height = 4;
      spec.connect = 4;
      spec.gravity = true;
      spec.temperature_cutoff = 8;
    }
    const int dr[] = {0, 1, 1, 1};
    const int dc[] = {1, 0, 1, -1};
    for (int r = 0; r < spec.height; ++r) {
      for (int c = 0; c < spec.width; ++c) {
        for (int d = 0; d < 4; ++d) {
          const int er = r + dr[d] * (spec.connect - 1);
          const int ec = c + dc[d] * (spec.connect - 1);
          if (er < 0 || er >= spec.height || ec < 0 || ec >= spec.width) {
            continue;
          }
          std::vector<int> line;
          for (int k = 0; k < spec.connect; ++k) {
            line.push_back((r + dr[d] * k) * spec.width + c + dc[d] * k);
          }
          spec.lines_.push_back(std::move(line));
        }
      }
    }
    return spec;
  }

  std::vector<std::vector<int>> lines_;
};

class GameState {
 public:
  explicit GameState(const GameSpec& spec) : spec_(&spec) {
    board_.fill(Cell::kEmpty);
  }

  static GameState Initial(const GameSpec& spec) { return GameState(spec); }

  const GameSpec& spec() const { return *spec_; }
  const Board& board() const { return board_; }
  Cell cell(int index) const { return board_[index]; }
  Cell cell(int row, int col) const { return board_[row * spec_->width + col]; }
  Player to_move() const { return to_move_; }
  int move_count() const { return move_count_; }
  // Most recent first; at most spec().history_length entries.
  const std::vector<Board>& history() const { return history_; }

  bool IsTerminal() const { return TerminalOutcome().has_value(); }

  std::optional<Outcome> TerminalOutcome() const {
    if (outcome_ == kOngoing) return std::nullopt;
    return Outcome{outcome_};
  }

  std::vector<MoveId> LegalMoves() const {
    std::vector<MoveId> moves;
    if (IsTerminal()) return moves;
    const int n = spec_->num_moves();
    moves.reserve(n);
    for (MoveId m = 0; m < n; ++m) {
      if (TargetCell(m) >= 0) moves.push_back(m);
    }
    return moves;
  }

  bool IsLegal(MoveId move) const {
    return move >= 0 && move < spec_->num_moves() && !IsTerminal() &&
           TargetCell(move) >= 0;
  }

  // Board cell a move would occupy, or -1 when the move is not playable on
  // the current board (ignores terminality).
  int TargetCell(MoveId move) const {
    if (move < 0 || move >= spec_->num_moves()) return -1;
    if (!spec_->gravity) return board_[move] == Cell::kEmpty ? move : -1;
    for (int r = 0; r < spec_->height; ++r) {
      const int idx = r * spec_->width + move;
      if (board_[idx] == Cell::kEmpty) return idx;
    }
    return -1;
  }

  GameState ApplyMove(MoveId move) const {
    if (!IsLegal(move)) {
      throw IllegalMoveError("illegal move " + std::to_string(move) +
                             " in state " + Serialize());
    }
    GameState next = *this;
    if (spec_->history_length > 0) {
      next.history_.insert(next.history_.begin(), board_);
      if (static_cast<int>(next.history_.size()) > spec_->history_length) {
        next.history_.pop_back();
      }
    }
    next.board_[TargetCell(move)] = CellOf(to_move_);
    next.to_move_ = Opponent(to_move_);
    next.move_count_ = move_count_ + 1;
    next.outcome_ = next.ComputeOutcome();
    return next;
  }

  int CountPieces() const {
    int n = 0;
    for (int i = 0; i < spec_->num_cells(); ++i) {
      n += board_[i] != Cell::kEmpty;
    }
    return n;
  }

  // Base-3 board code; together with the implied side to move it identifies
  // the position uniquely within a game.
  std::uint64_t BoardKey() const {
    std::uint64_t key = 0;
    for (int i = spec_->num_cells() - 1; i >= 0; --i) {
      key = key * 3 + static_cast<std::uint64_t>(board_[i]);
    }
    return key;
  }

  // "<game-id> <cells row-major> <side-to-move>", e.g.
  // "tictactoe X...O.... X". History is not serialized.
  std::string Serialize() const {
    std::string out = spec_->id;
    out.push_back(' ');
    for (int i = 0; i < spec_->num_cells(); ++i) {
      out.push_back(board_[i] == Cell::kEmpty ? '.'
                    : board_[i] == Cell::kP1  ? 'X'
                                              : 'O');
    }
    out.push_back(' ');
    out.push_back(to_move_ == Player::kP1 ? 'X' : 'O');
    return out;
  }

  static GameState Parse(std::string_view text, int history_length = 0) {
    std::istringstream in{std::string(text)};
    std::string id, cells, side, extra;
    if (!(in >> id >> cells >> side) || (in >> extra)) {
      throw ParseError("malformed position '" + std::string(text) + "'");
    }
    const GameSpec& spec = GameSpec::FromId(id, history_length);
    if (static_cast<int>(cells.size()) != spec.num_cells()) {
      throw ParseError("wrong cell count in '" + std::string(text) + "'");
    }
    GameState state(spec);
    int x = 0, o = 0;
    for (int i = 0; i < spec.num_cells(); ++i) {
      switch (cells[i]) {
        case '.': state.board_[i] = Cell::kEmpty; break;
        case 'X': state.board_[i] = Cell::kP1; ++x; break;
        case 'O': state.board_[i] = Cell::kP2; ++o; break;
        default:
          throw ParseError("bad cell character in '" + std::string(text) +
                           "'");
      }
    }
    if (side == "X") {
      state.to_move_ = Player::kP1;
      if (x != o) throw ParseError("X to move requires equal piece counts");
    } else if (side == "O") {
      state.to_move_ = Player::kP2;
      if (x != o + 1) throw ParseError("O to move requires one extra X");
    } else {
      throw ParseError("bad side to move '" + side + "'");
    }
    if (spec.gravity) {
      for (int c = 0; c < spec.width; ++c) {
        bool gap = false;
        for (int r = 0; r < spec.height; ++r) {
          const bool empty = state.board_[r * spec.width + c] == Cell::kEmpty;
          if (!empty && gap) throw ParseError("floating checker");
          gap = gap || empty;
        }
      }
    }
    state.move_count_ = x + o;
    state.outcome_ = state.ComputeOutcome();
    return state;
  }

  friend bool operator==(const GameState& a, const GameState& b) {
    return a.spec_ == b.spec_ && a.board_ == b.board_ &&
           a.to_move_ == b.to_move_ && a.move_count_ == b.move_count_ &&
           a.history_ == b.history_;
  }

 private:
  static constexpr std::int8_t kOngoing = 98;

  std::int8_t ComputeOutcome() const {
    for (const auto& line : spec_->lines()) {
      const Cell first = board_[line[0]];
      if (first == Cell::kEmpty) continue;
      bool all = true;
      for (std::size_t k = 1; k < line.size() && all; ++k) {
        all = board_[line[k]] == first;
      }
      if (all) return first == Cell::kP1 ? 1 : -1;
    }
    if (CountPieces() == spec_->num_cells()) return 0;
    return kOngoing;
  }

  const GameSpec* spec_;
  Board board_{};
  Player to_move_ = Player::kP1;
  int move_count_ = 0;
  std::vector<Board> history_;
  std::int8_t outcome_ = kOngoing;
};

// Free-function forms of the core game operations.
inline std::vector<MoveId> LegalMoves(const GameState& s) {
  return s.LegalMoves();
}
inline GameState ApplyMove(const GameState& s, MoveId m) {
  return s.ApplyMove(m);
}
inline std::optional<Outcome> TerminalOutcome(const GameState& s) {
  return s.TerminalOutcome();
}

}  // namespace teamzero

#endif  // TEAMZERO_GAME_HPP_
