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

// Oracle-labelled puzzles and their scoring.
//
// File format, one puzzle per line, tab separated:
//   id  kind  family  position  answer
// where position is GameState::Serialize() and the answer depends on kind:
//   unique          line(||line)*, line = step(;step)*, step = m(|m)*[>r]
//                   m are acceptable moves, r the stored opponent reply
//   multi_choice    m:score(,m:score)*   scores in [0, 1000]
//   value           value,threshold      value in {0, 0.5, 1}
// Lines starting with '#' are comments; the first line is a version header.

#ifndef TEAMZERO_PUZZLES_HPP_
#define TEAMZERO_PUZZLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "teamzero/evaluator.hpp"
#include "teamzero/game.hpp"
#include "teamzero/minimax.hpp"

namespace teamzero {

inline constexpr const char* kPuzzleFileHeader = "# teamzero-puzzles v1";

enum class PuzzleKind { kUniqueMultiStep, kMultiChoiceScored, kValueThreshold };

inline std::string PuzzleKindName(PuzzleKind k) {
  switch (k) {
    case PuzzleKind::kUniqueMultiStep: return "unique";
    case PuzzleKind::kMultiChoiceScored: return "multi_choice";
    case PuzzleKind::kValueThreshold: return "value";
  }
  return "unique";
}

inline PuzzleKind ParsePuzzleKind(const std::string& s) {
  if (s == "unique") return PuzzleKind::kUniqueMultiStep;
  if (s == "multi_choice") return PuzzleKind::kMultiChoiceScored;
  if (s == "value") return PuzzleKind::kValueThreshold;
  throw ParseError("unknown puzzle kind '" + s + "'");
}

struct PuzzleStep {
  std::vector<MoveId> accept;   // or-list
  std::optional<MoveId> reply;  // opponent's stored answer
  friend bool operator==(const PuzzleStep&, const PuzzleStep&) = default;
};

using PuzzleLine = std::vector<PuzzleStep>;  // and-list

struct Puzzle {
  std::string id;
  PuzzleKind kind = PuzzleKind::kUniqueMultiStep;
  std::string family;
  GameState position{GameSpec::Get(GameKind::kTicTacToe)};
  std::vector<PuzzleLine> lines;              // unique
  std::vector<std::pair<MoveId, int>> scores; // multi_choice, ascending moves
  double true_value = 0.5;                    // value
  double threshold = 0.25;                    // value

  // Positions met along the first solution line, the start included.
  std::vector<GameState> LinePositions() const {
    std::vector<GameState> out{position};
    if (kind != PuzzleKind::kUniqueMultiStep || lines.empty()) return out;
    GameState s = position;
    for (const auto& step : lines[0]) {
      s = s.ApplyMove(step.accept.at(0));
      out.push_back(s);
      if (!step.reply) break;
      s = s.ApplyMove(*step.reply);
      out.push_back(s);
    }
    return out;
  }
};

// Family label: the contents of board row 0.
inline std::string PuzzleFamily(const GameState& s) {
  std::string f;
  for (int c = 0; c < s.spec().width; ++c) {
    const Cell x = s.cell(0, c);
    f.push_back(x == Cell::kEmpty ? '.' : x == Cell::kP1 ? 'X' : 'O');
  }
  return f;
}

// ---------------------------------------------------------------------------
// Serialization

namespace internal {

inline std::vector<std::string> SplitOn(const std::string& s,
                                        const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = s.find(sep, start);
    if (k == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, k - start));
    start = k + sep.size();
  }
}

inline int ParseIntStrict(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad " + what + " '" + s + "'");
  }
  if (used != s.size()) throw ParseError("bad " + what + " '" + s + "'");
  return v;
}

inline double ParseDoubleStrict(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad " + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw ParseError("bad " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace internal

inline std::string SerializeAnswer(const Puzzle& p) {
  std::ostringstream out;
  switch (p.kind) {
    case PuzzleKind::kUniqueMultiStep:
      for (std::size_t l = 0; l < p.lines.size(); ++l) {
        if (l) out << "||";
        for (std::size_t k = 0; k < p.lines[l].size(); ++k) {
          if (k) out << ';';
          const auto& step = p.lines[l][k];
          for (std::size_t a = 0; a < step.accept.size(); ++a) {
            out << (a ? "|" : "") << step.accept[a];
          }
          if (step.reply) out << '>' << *step.reply;
        }
      }
      break;
    case PuzzleKind::kMultiChoiceScored:
      for (std::size_t k = 0; k < p.scores.size(); ++k) {
        out << (k ? "," : "") << p.scores[k].first << ':' << p.scores[k].second;
      }
      break;
    case PuzzleKind::kValueThreshold: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g,%g", p.true_value, p.threshold);
      out << buf;
      break;
    }
  }
  return out.str();
}

inline std::string SerializePuzzle(const Puzzle& p) {
  return p.id + '\t' + PuzzleKindName(p.kind) + '\t' + p.family + '\t' +
         p.position.Serialize() + '\t' + SerializeAnswer(p);
}

inline Puzzle ParsePuzzle(const std::string& text, int history_length = 0) {
  const auto f = internal::SplitOn(text, "\t");
  if (f.size() != 5) throw ParseError("puzzle needs 5 tab-separated fields");
  Puzzle p;
  p.id = f[0];
  p.kind = ParsePuzzleKind(f[1]);
  p.family = f[2];
  p.position = GameState::Parse(f[3], history_length);
  if (p.position.IsTerminal()) throw ParseError("puzzle position is terminal");
  const std::string& a = f[4];
  if (a.empty()) throw ParseError("empty puzzle answer");
  switch (p.kind) {
    case PuzzleKind::kUniqueMultiStep:
      for (const auto& line_text : internal::SplitOn(a, "||")) {
        PuzzleLine line;
        for (const auto& step_text : internal::SplitOn(line_text, ";")) {
          PuzzleStep step;
          const auto parts = internal::SplitOn(step_text, ">");
          if (parts.size() > 2) throw ParseError("bad step '" + step_text + "'");
          for (const auto& m : internal::SplitOn(parts[0], "|")) {
            step.accept.push_back(internal::ParseIntStrict(m, "move"));
          }
          if (parts.size() == 2) step.reply = internal::ParseIntStrict(parts[1], "reply");
          line.push_back(std::move(step));
        }
        p.lines.push_back(std::move(line));
      }
      break;
    case PuzzleKind::kMultiChoiceScored:
      for (const auto& item : internal::SplitOn(a, ",")) {
        const auto kv = internal::SplitOn(item, ":");
        if (kv.size() != 2) throw ParseError("bad move score '" + item + "'");
        const int score = internal::ParseIntStrict(kv[1], "score");
        if (score < 0 || score > 1000) throw ParseError("score outside [0, 1000]");
        p.scores.emplace_back(internal::ParseIntStrict(kv[0], "move"), score);
      }
      break;
    case PuzzleKind::kValueThreshold: {
      const auto kv = internal::SplitOn(a, ",");
      if (kv.size() != 2) throw ParseError("bad value answer '" + a + "'");
      p.true_value = internal::ParseDoubleStrict(kv[0], "value");
      p.threshold = internal::ParseDoubleStrict(kv[1], "threshold");
      if (p.true_value != 0.0 && p.true_value != 0.5 && p.true_value != 1.0) {
        throw ParseError("value must be 0, 0.5 or 1");
      }
      if (!(p.threshold > 0.0)) throw ParseError("threshold must be positive");
      break;
    }
  }
  return p;
}

inline void WritePuzzles(std::ostream& out, const std::vector<Puzzle>& puzzles) {
  out << kPuzzleFileHeader << '\n';
  for (const auto& p : puzzles) out << SerializePuzzle(p) << '\n';
}

inline std::vector<Puzzle> ReadPuzzles(std::istream& in, int history_length = 0) {
  std::vector<Puzzle> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    try {
      out.push_back(ParsePuzzle(line, history_length));
    } catch (const std::exception& e) {
      throw ParseError("puzzle line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Puzzle> LoadPuzzles(const std::string& path,
                                       int history_length = 0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open puzzle file '" + path + "'");
  return ReadPuzzles(in, history_length);
}

// ---------------------------------------------------------------------------
// Scoring

class PuzzleKindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Responses: a move policy for unique puzzles, a single move for multi-choice,
// the root Q (in [-1, 1]) of the chosen move for value puzzles.
using MovePolicy = std::function<MoveId(const GameState&)>;
using PuzzleResponse = std::variant<MovePolicy, MoveId, double>;

inline double ScoreUnique(const Puzzle& p, const MovePolicy& policy) {
  std::vector<const PuzzleLine*> live;
  for (const auto& l : p.lines) live.push_back(&l);
  GameState s = p.position;
  for (std::size_t k = 0; !live.empty(); ++k) {
    const MoveId m = policy(s);
    std::vector<const PuzzleLine*> next;
    for (const PuzzleLine* l : live) {
      if (k >= l->size()) continue;
      const auto& acc = (*l)[k].accept;
      if (std::find(acc.begin(), acc.end(), m) == acc.end()) continue;
      if (!(*l)[k].reply) return 1.0;  // a line is complete
      next.push_back(l);
    }
    if (next.empty()) return 0.0;
    // The opponent answers with the first surviving line's reply.
    const MoveId reply = *(*next[0])[k].reply;
    live.clear();
    for (const PuzzleLine* l : next) {
      if (*(*l)[k].reply == reply) live.push_back(l);
    }
    s = s.ApplyMove(m).ApplyMove(reply);
  }
  return 0.0;
}

inline double ScoreMultiChoice(const Puzzle& p, MoveId move) {
  for (const auto& [m, score] : p.scores) {
    if (m == move) return score / 1000.0;
  }
  return 0.0;
}

// The value prediction is (q + 1) / 2.
inline double ScoreValue(const Puzzle& p, double root_q) {
  const double predicted = (root_q + 1.0) / 2.0;
  return std::abs(predicted - p.true_value) <= p.threshold + 1e-12 ? 1.0 : 0.0;
}

inline double ScorePuzzle(const Puzzle& p, const PuzzleResponse& r) {
  switch (p.kind) {
    case PuzzleKind::kUniqueMultiStep:
      if (!std::holds_alternative<MovePolicy>(r)) break;
      return ScoreUnique(p, std::get<MovePolicy>(r));
    case PuzzleKind::kMultiChoiceScored:
      if (!std::holds_alternative<MoveId>(r)) break;
      return ScoreMultiChoice(p, std::get<MoveId>(r));
    case PuzzleKind::kValueThreshold:
      if (!std::holds_alternative<double>(r)) break;
      return ScoreValue(p, std::get<double>(r));
  }
  throw PuzzleKindError("response does not match puzzle kind '" +
                        PuzzleKindName(p.kind) + "'");
}

// ---------------------------------------------------------------------------
// Generation

struct PuzzleCriteria {
  bool unique = true;
  bool multi_choice = true;
  bool value_threshold = true;
  int max_depth = -1;         // positions with at most this many moves; < 0: all
  int max_steps = 3;          // agent moves per unique line
  int partial_score = 300;    // multi-choice: a drawing move in a won position
  int min_line_gap = 3;       // value: open-line imbalance for a fortress
  double threshold = 0.25;
  const Model* baseline = nullptr;  // hardness filter when set
  int baseline_latent = 0;
};

// Open-line count: sum over lines free of opponent stones of own stones.
inline int OpenLineScore(const GameState& s, Player p) {
  const Cell own = CellOf(p), opp = CellOf(Opponent(p));
  int total = 0;
  for (const auto& line : s.spec().lines()) {
    int mine = 0;
    bool blocked = false;
    for (int c : line) {
      if (s.cell(c) == opp) blocked = true;
      if (s.cell(c) == own) ++mine;
    }
    if (!blocked) total += mine;
  }
  return total;
}

inline MoveId GreedyPriorMove(const Model& model, const GameState& s, int latent) {
  const EvalOutput out = model.Evaluate(s, latent);
  MoveId best = -1;
  double best_p = -1.0;
  for (MoveId m : s.LegalMoves()) {
    if (out.p[m] > best_p) {
      best_p = out.p[m];
      best = m;
    }
  }
  return best;
}

namespace internal {

// Agent steps of a unique line from s, which has exactly one optimal move.
inline PuzzleLine UniqueLine(MinimaxSolver& solver, GameState s, int max_steps) {
  PuzzleLine line;
  while (true) {
    const MinimaxSolution sol = solver.Solve(s);
    PuzzleStep step{{sol.optimal_moves[0]}, std::nullopt};
    line.push_back(step);
    const GameState after = s.ApplyMove(step.accept[0]);
    if (after.IsTerminal() || static_cast<int>(line.size()) >= max_steps) break;
    const MoveId reply = solver.Solve(after).optimal_moves.at(0);
    const GameState next = after.ApplyMove(reply);
    if (next.IsTerminal()) break;
    const MinimaxSolution nsol = solver.Solve(next);
    if (nsol.optimal_moves.size() != 1 || next.LegalMoves().size() < 2) break;
    line.back().reply = reply;
    s = next;
  }
  return line;
}

}  // namespace internal

// Scans reachable positions in ReachableStates order and emits, per position,
// at most one puzzle of each enabled kind:
//   unique        exactly one optimal move among >= 2 legal moves;
//   multi_choice  >= 2 optimal moves and >= 1 non-optimal move;
//   value         oracle draw with an open-line imbalance >= min_line_gap.
// With a baseline, unique and multi-choice puzzles whose first move the
// baseline's greedy prior already gets right are dropped.
inline std::vector<Puzzle> GeneratePuzzles(const GameSpec& spec,
                                           MinimaxSolver& solver,
                                           const PuzzleCriteria& criteria) {
  std::vector<Puzzle> out;
  int counter[3] = {0, 0, 0};
  for (const GameState& s : ReachableStates(spec, criteria.max_depth)) {
    if (s.IsTerminal()) continue;
    const auto legal = s.LegalMoves();
    const MinimaxSolution sol = solver.Solve(s);
    const MoveId baseline_move =
        criteria.baseline ? GreedyPriorMove(*criteria.baseline, s,
                                            criteria.baseline_latent)
                          : -1;
    auto optimal = [&](MoveId m) {
      return std::find(sol.optimal_moves.begin(), sol.optimal_moves.end(), m) !=
             sol.optimal_moves.end();
    };
    auto make = [&](PuzzleKind kind) {
      Puzzle p;
      p.kind = kind;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%c%05d",
                    "umv"[static_cast<int>(kind)], counter[static_cast<int>(kind)]++);
      p.id = buf;
      p.family = PuzzleFamily(s);
      p.position = s;
      return p;
    };
    if (criteria.unique && sol.optimal_moves.size() == 1 && legal.size() >= 2 &&
        !(criteria.baseline && optimal(baseline_move))) {
      Puzzle p = make(PuzzleKind::kUniqueMultiStep);
      p.lines.push_back(internal::UniqueLine(solver, s, criteria.max_steps));
      out.push_back(std::move(p));
    }
    if (criteria.multi_choice && sol.optimal_moves.size() >= 2 &&
        sol.optimal_moves.size() < legal.size() &&
        !(criteria.baseline && optimal(baseline_move))) {
      Puzzle p = make(PuzzleKind::kMultiChoiceScored);
      for (MoveId m : legal) {
        const int v = -solver.Value(s.ApplyMove(m));
        int score = 0;
        if (v == sol.value) score = 1000;
        else if (sol.value == 1 && v == 0) score = criteria.partial_score;
        p.scores.emplace_back(m, score);
      }
      out.push_back(std::move(p));
    }
    if (criteria.value_threshold && sol.value == 0 &&
        std::abs(OpenLineScore(s, s.to_move()) -
                 OpenLineScore(s, Opponent(s.to_move()))) >= criteria.min_line_gap) {
      Puzzle p = make(PuzzleKind::kValueThreshold);
      p.true_value = 0.5;
      p.threshold = criteria.threshold;
      out.push_back(std::move(p));
    }
  }
  return out;
}

inline std::vector<Puzzle> FilterKind(const std::vector<Puzzle>& puzzles,
                                      PuzzleKind kind) {
  std::vector<Puzzle> out;
  for (const auto& p : puzzles) {
    if (p.kind == kind) out.push_back(p);
  }
  return out;
}

}  // namespace teamzero

#endif  // TEAMZERO_PUZZLES_HPP_
