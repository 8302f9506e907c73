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

// PUCT Monte-Carlo tree search with optional diversity-aware value mixing.
//
// Conventions:
//   * Edge statistics are stored from the perspective of the player to move
//     at the edge's parent node; backup negates the value every ply.
//   * The root is expanded before the first simulation, so after n
//     simulations the root visit counts sum to exactly n.
//   * One latent (the searching player's) conditions every evaluation in the
//     tree, on both sides of the board.
//
// With diversity enabled, the value backed up from a leaf is, from the root
// player's perspective,
//
//   lambda * v + (1 - lambda) * (R + [root player to move at leaf] * v_d)
//
// where v is the leaf value turned to the root player's perspective and R
// sums the root player's intrinsic rewards along the root-to-leaf path.
// Edges played by the opponent contribute zero. Terminal leaves use the
// exact outcome for v and zero for v_d.

#ifndef TEAMZERO_SEARCH_HPP_
#define TEAMZERO_SEARCH_HPP_

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "teamzero/diversity.hpp"
#include "teamzero/encoding.hpp"
#include "teamzero/evaluator.hpp"
#include "teamzero/game.hpp"
#include "teamzero/random.hpp"

namespace teamzero {

struct NodeStats {
  int n = 0;
  double w = 0.0;
  double q = 0.0;
  double p = 0.0;
};

struct SearchConfig {
  int n_simulations = 100;
  double c_base = 19652.0;
  double c_init = 1.25;
  bool diversity = false;
  double lambda = 1.0;  // of the searching player
  bool root_noise = false;
  double noise_alpha = 0.3;
  double noise_fraction = 0.25;
};

struct RootMoveStats {
  MoveId move = 0;
  int n = 0;
  double q = 0.0;
  double u = 0.0;
  double p = 0.0;
};

struct SearchResult {
  std::vector<double> pi;            // over all MoveIds
  std::vector<RootMoveStats> moves;  // legal root moves, ascending
  double root_value = 0.0;           // visit-weighted Q, root mover's view
  EvalOutput root_eval;
  int total_visits = 0;
};

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// C(s) = ln((1 + N(s) + c_base) / c_base) + c_init.
inline double ExplorationRate(int parent_visits, const SearchConfig& config) {
  return std::log((1.0 + parent_visits + config.c_base) / config.c_base) +
         config.c_init;
}

inline double ExplorationBonus(const NodeStats& s, int parent_visits,
                               double c) {
  return c * s.p * std::sqrt(static_cast<double>(parent_visits)) /
         (1.0 + s.n);
}

inline std::vector<double> PuctScores(std::span<const NodeStats> children,
                                      int parent_visits, double c) {
  std::vector<double> scores(children.size());
  for (std::size_t a = 0; a < children.size(); ++a) {
    scores[a] = children[a].q + ExplorationBonus(children[a], parent_visits, c);
  }
  return scores;
}

// Index of the argmax; exact ties are broken uniformly at random. The rng is
// only consumed when there is more than one maximizer.
inline std::size_t ArgmaxRandomTie(std::span<const double> values, Rng& rng) {
  if (values.empty()) throw SearchError("argmax of empty set");
  double best = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  std::size_t first = 0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] > best) {
      best = values[a];
      count = 1;
      first = a;
    } else if (values[a] == best) {
      ++count;
    }
  }
  if (count == 1) return first;
  std::size_t pick = rng.UniformInt(count);
  for (std::size_t a = 0; a < values.size(); ++a) {
    if (values[a] == best && pick-- == 0) return a;
  }
  return first;
}

inline std::size_t PuctSelectWithRate(std::span<const NodeStats> children,
                                      int parent_visits, double c, Rng& rng) {
  const auto scores = PuctScores(children, parent_visits, c);
  return ArgmaxRandomTie(scores, rng);
}

inline std::size_t PuctSelect(std::span<const NodeStats> children,
                              int parent_visits, const SearchConfig& config,
                              Rng& rng) {
  return PuctSelectWithRate(children, parent_visits,
                            ExplorationRate(parent_visits, config), rng);
}

// `path` runs from the root to the leaf's parent edge. `value` is from the
// perspective of the player to move at the node owning the last edge;
// earlier edges receive alternating signs.
inline void Backup(std::span<NodeStats* const> path, double value) {
  double v = value;
  for (std::size_t k = path.size(); k-- > 0;) {
    NodeStats& s = *path[k];
    s.n += 1;
    s.w += v;
    s.q = s.w / s.n;
    v = -v;
  }
}

// Greedy unless move_number < cutoff, in which case the move is sampled with
// probability proportional to its count (temperature 1).
inline std::size_t SelectFromCounts(std::span<const double> counts,
                                    int move_number, int cutoff, Rng& rng) {
  if (move_number < cutoff) return rng.Categorical(counts);
  return ArgmaxRandomTie(counts, rng);
}

// Samples proportionally to count^(1/tau).
inline std::size_t SelectWithTemperature(std::span<const double> counts,
                                         double tau, Rng& rng) {
  std::vector<double> w(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    w[a] = counts[a] > 0.0 ? std::pow(counts[a], 1.0 / tau) : 0.0;
  }
  return rng.Categorical(w);
}

inline MoveId SelectAction(const SearchResult& result, int move_number,
                           int cutoff, Rng& rng) {
  std::vector<double> counts;
  for (const auto& m : result.moves) counts.push_back(m.n);
  return result.moves[SelectFromCounts(counts, move_number, cutoff, rng)].move;
}

inline MoveId SelectGreedy(const SearchResult& result, Rng& rng) {
  return SelectAction(result, 0, 0, rng);
}

// One simulation, for tests and debugging.
struct SimulationTrace {
  std::vector<MoveId> path;
  double leaf_value = 0.0;  // backed-up value, root player's perspective
  double intrinsic_sum = 0.0;
};

class Searcher {
 public:
  struct Edge {
    MoveId move = 0;
    NodeStats stats;
    double r_d = 0.0;
    int child = -1;
  };
  struct Node {
    GameState state;
    std::vector<Edge> edges;
    bool expanded = false;
  };

  // `team` may be null when diversity is disabled.
  Searcher(const Evaluator& evaluator, const TeamState* team,
           SearchConfig config)
      : evaluator_(evaluator), team_(team), config_(config) {
    if (config_.n_simulations < 1) {
      throw SearchError("n_simulations must be >= 1");
    }
    if (config_.diversity && team_ == nullptr) {
      throw SearchError("diversity search needs a team state");
    }
  }

  void set_trace(std::function<void(const SimulationTrace&)> trace) {
    trace_ = std::move(trace);
  }

  SearchResult Run(const GameState& root_state, int latent, Rng& rng) {
    if (root_state.LegalMoves().empty()) {
      throw SearchError("search from a state without legal moves: " +
                        root_state.Serialize());
    }
    nodes_.clear();
    latent_ = latent;
    root_player_ = root_state.to_move();
    if (config_.diversity && team_->n_players >= 2) {
      rival_ = NearestRival(latent, *team_);
    } else {
      rival_ = -1;
    }
    nodes_.push_back(Node{root_state, {}, false});
    const EvalOutput root_eval = Expand(0);
    if (config_.root_noise) AddRootNoise(rng);

    std::vector<std::pair<int, std::size_t>> visited;  // (node, edge)
    std::vector<NodeStats*> path;
    SimulationTrace trace;
    for (int sim = 0; sim < config_.n_simulations; ++sim) {
      visited.clear();
      trace.path.clear();
      double intrinsic = 0.0;
      int node = 0;
      while (nodes_[node].expanded) {
        const std::size_t a = SelectEdge(nodes_[node], rng);
        const Edge& e = nodes_[node].edges[a];
        visited.emplace_back(node, a);
        trace.path.push_back(e.move);
        if (nodes_[node].state.to_move() == root_player_) intrinsic += e.r_d;
        if (e.child < 0) {
          GameState next = nodes_[node].state.ApplyMove(e.move);
          const int child = static_cast<int>(nodes_.size());
          nodes_[node].edges[a].child = child;
          nodes_.push_back(Node{std::move(next), {}, false});
          node = child;
          break;
        }
        node = e.child;
      }

      double v = 0.0, v_d = 0.0;
      const Node& leaf = nodes_[node];
      if (auto outcome = leaf.state.TerminalOutcome()) {
        v = outcome->For(leaf.state.to_move());
      } else {
        const EvalOutput out = Expand(node);
        v = out.v;
        v_d = out.v_d;
      }
      const bool root_to_move = nodes_[node].state.to_move() == root_player_;
      double root_view = root_to_move ? v : -v;
      if (config_.diversity) {
        const double lambda = config_.lambda;
        root_view = lambda * root_view +
                    (1.0 - lambda) * (intrinsic + (root_to_move ? v_d : 0.0));
      }
      const double leaf_mover_view = root_to_move ? root_view : -root_view;
      path.clear();
      for (const auto& [n, a] : visited) path.push_back(&nodes_[n].edges[a].stats);
      Backup(path, -leaf_mover_view);
      if (trace_) {
        trace.leaf_value = root_view;
        trace.intrinsic_sum = intrinsic;
        trace_(trace);
      }
    }
    return MakeResult(root_eval);
  }

  const std::vector<Node>& nodes() const { return nodes_; }

  // Largest |Q - W/N| over all visited edges (0 for a consistent tree), and
  // the number of edges with Q != 0 while N == 0.
  std::pair<double, int> Audit() const {
    double worst = 0.0;
    int bad_unvisited = 0;
    for (const auto& node : nodes_) {
      for (const auto& e : node.edges) {
        if (e.stats.n > 0) {
          worst = std::max(worst, std::abs(e.stats.q - e.stats.w / e.stats.n));
        } else if (e.stats.q != 0.0 || e.stats.w != 0.0) {
          ++bad_unvisited;
        }
      }
    }
    return {worst, bad_unvisited};
  }

 private:
  EvalOutput Expand(int index) {
    const EvalOutput out = evaluator_.Evaluate(nodes_[index].state, latent_);
    Node& node = nodes_[index];
    const bool own_turn = node.state.to_move() == root_player_;
    for (MoveId m : node.state.LegalMoves()) {
      Edge e;
      e.move = m;
      e.stats.p = out.p[m];
      if (own_turn && rival_ >= 0) {
        const FeatureVector phi = FeatureMap(node.state, m);
        e.r_d = IntrinsicReward(phi, team_->psi[latent_], team_->psi[rival_],
                                team_->l0);
      }
      node.edges.push_back(e);
    }
    node.expanded = true;
    return out;
  }

  void AddRootNoise(Rng& rng) {
    auto& edges = nodes_[0].edges;
    const auto noise = rng.Dirichlet(edges.size(), config_.noise_alpha);
    for (std::size_t a = 0; a < edges.size(); ++a) {
      edges[a].stats.p = (1.0 - config_.noise_fraction) * edges[a].stats.p +
                         config_.noise_fraction * noise[a];
    }
  }

  std::size_t SelectEdge(const Node& node, Rng& rng) const {
    int parent = 0;
    for (const auto& e : node.edges) parent += e.stats.n;
    const double c = ExplorationRate(parent, config_);
    std::vector<double> scores(node.edges.size());
    for (std::size_t a = 0; a < node.edges.size(); ++a) {
      scores[a] = node.edges[a].stats.q +
                  ExplorationBonus(node.edges[a].stats, parent, c);
    }
    return ArgmaxRandomTie(scores, rng);
  }

  SearchResult MakeResult(const EvalOutput& root_eval) const {
    const Node& root = nodes_[0];
    SearchResult r;
    r.root_eval = root_eval;
    r.pi.assign(root.state.spec().num_moves(), 0.0);
    int total = 0;
    double weighted = 0.0;
    for (const auto& e : root.edges) {
      total += e.stats.n;
      weighted += e.stats.w;
    }
    const double c = ExplorationRate(total, config_);
    for (const auto& e : root.edges) {
      r.moves.push_back(RootMoveStats{e.move, e.stats.n, e.stats.q,
                                      ExplorationBonus(e.stats, total, c),
                                      e.stats.p});
      r.pi[e.move] = static_cast<double>(e.stats.n) / total;
    }
    r.total_visits = total;
    r.root_value = weighted / total;
    return r;
  }

  const Evaluator& evaluator_;
  const TeamState* team_;
  SearchConfig config_;
  std::function<void(const SimulationTrace&)> trace_;
  std::vector<Node> nodes_;
  int latent_ = 0;
  int rival_ = -1;
  Player root_player_ = Player::kP1;
};

inline SearchResult RunSearch(const GameState& state, int latent,
                              const Evaluator& evaluator,
                              const TeamState* team,
                              const SearchConfig& config, Rng& rng) {
  Searcher searcher(evaluator, team, config);
  return searcher.Run(state, latent, rng);
}

inline std::string FormatTrace(const SimulationTrace& t) {
  std::string out = "path=";
  for (std::size_t k = 0; k < t.path.size(); ++k) {
    if (k) out.push_back(',');
    out += std::to_string(t.path[k]);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), " leaf=%.17g intrinsic=%.17g", t.leaf_value,
                t.intrinsic_sum);
  return out + buf;
}

}  // namespace teamzero

#endif  // TEAMZERO_SEARCH_HPP_
