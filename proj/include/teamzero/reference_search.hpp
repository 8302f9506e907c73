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

// Plain single-player-latent AlphaZero MCTS, written independently of
// Searcher and without any diversity machinery. It exists as the reference
// code path the team search must reduce to when diversity is off; it consumes
// the rng in the same order (one draw per multi-way tie) so results can be
// compared bit for bit.

#ifndef TEAMZERO_REFERENCE_SEARCH_HPP_
#define TEAMZERO_REFERENCE_SEARCH_HPP_

#include <cmath>
#include <memory>
#include <vector>

#include "teamzero/evaluator.hpp"
#include "teamzero/game.hpp"
#include "teamzero/random.hpp"
#include "teamzero/search.hpp"

namespace teamzero::reference {

class VanillaMcts {
 public:
  VanillaMcts(const Evaluator& evaluator, int n_simulations, double c_base,
              double c_init)
      : evaluator_(evaluator),
        n_simulations_(n_simulations),
        c_base_(c_base),
        c_init_(c_init) {}

  SearchResult Run(const GameState& state, int latent, Rng& rng) {
    if (state.LegalMoves().empty()) {
      throw SearchError("search from a state without legal moves");
    }
    latent_ = latent;
    Node root{state, {}, false};
    const EvalOutput root_eval = Expand(root);
    for (int i = 0; i < n_simulations_; ++i) Simulate(root, rng);

    SearchResult r;
    r.root_eval = root_eval;
    r.pi.assign(state.spec().num_moves(), 0.0);
    int total = 0;
    double w = 0.0;
    for (const auto& c : root.children) {
      total += c.n;
      w += c.w;
    }
    const double rate =
        std::log((1.0 + total + c_base_) / c_base_) + c_init_;
    for (const auto& c : root.children) {
      const double u = rate * c.p * std::sqrt(static_cast<double>(total)) /
                       (1.0 + c.n);
      r.moves.push_back(RootMoveStats{c.move, c.n, c.q, u, c.p});
      r.pi[c.move] = static_cast<double>(c.n) / total;
    }
    r.total_visits = total;
    r.root_value = w / total;
    return r;
  }

 private:
  struct Node;
  struct Child {
    MoveId move;
    double p;
    int n = 0;
    double w = 0.0;
    double q = 0.0;
    std::unique_ptr<Node> node;
  };
  struct Node {
    GameState state;
    std::vector<Child> children;
    bool expanded = false;
  };

  EvalOutput Expand(Node& node) {
    const EvalOutput out = evaluator_.Evaluate(node.state, latent_);
    for (MoveId m : node.state.LegalMoves()) {
      node.children.push_back(Child{m, out.p[m], 0, 0.0, 0.0, nullptr});
    }
    node.expanded = true;
    return out;
  }

  // Returns the value of `node` for its player to move.
  double Simulate(Node& node, Rng& rng) {
    if (auto outcome = node.state.TerminalOutcome()) {
      return outcome->For(node.state.to_move());
    }
    if (!node.expanded) return Expand(node).v;

    int parent = 0;
    for (const auto& c : node.children) parent += c.n;
    const double rate =
        std::log((1.0 + parent + c_base_) / c_base_) + c_init_;
    std::vector<double> scores;
    for (const auto& c : node.children) {
      scores.push_back(c.q + rate * c.p *
                                 std::sqrt(static_cast<double>(parent)) /
                                 (1.0 + c.n));
    }
    Child& child = node.children[ArgmaxRandomTie(scores, rng)];
    if (!child.node) {
      child.node = std::make_unique<Node>(
          Node{node.state.ApplyMove(child.move), {}, false});
    }
    const double value = -Simulate(*child.node, rng);
    child.n += 1;
    child.w += value;
    child.q = child.w / child.n;
    return value;
  }

  const Evaluator& evaluator_;
  int n_simulations_;
  double c_base_;
  double c_init_;
  int latent_ = 0;
};

}  // namespace teamzero::reference

#endif  // TEAMZERO_REFERENCE_SEARCH_HPP_
