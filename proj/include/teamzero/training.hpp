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

// Self-play training: start positions, game generation under the
// matchmaker, replay storage, target construction and the learner loop.
//
// One iteration of Trainer::Run:
//   1. sample `games_per_iteration` matchups with the learner rng;
//   2. play the games against a snapshot of the parameters and the actors'
//      copy of the team state, each game with its own rng derived from
//      (seed, game index), on up to `workers` threads;
//   3. in game order: record the result, update psi of the exploiter from its
//      own steps, keep the exploiter's transitions (subsampled) in the replay;
//   4. run `updates_per_iteration` SGD steps on uniform replay batches.
// The actors' psi is refreshed from the learner's every `psi_sync()` steps.
// The result does not depend on the worker count.

#ifndef TEAMZERO_TRAINING_HPP_
#define TEAMZERO_TRAINING_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "teamzero/config.hpp"
#include "teamzero/diversity.hpp"
#include "teamzero/encoding.hpp"
#include "teamzero/evaluator.hpp"
#include "teamzero/league.hpp"
#include "teamzero/random.hpp"
#include "teamzero/reference_search.hpp"
#include "teamzero/search.hpp"

namespace teamzero {

// ---------------------------------------------------------------------------
// Configuration

enum class SplitMode { kNone, kRandom, kHeldOutFamily };

inline std::string SplitModeName(SplitMode m) {
  switch (m) {
    case SplitMode::kNone: return "none";
    case SplitMode::kRandom: return "random";
    case SplitMode::kHeldOutFamily: return "held_out_family";
  }
  return "none";
}

inline SplitMode ParseSplitMode(const std::string& s) {
  if (s == "none") return SplitMode::kNone;
  if (s == "random") return SplitMode::kRandom;
  if (s == "held_out_family") return SplitMode::kHeldOutFamily;
  throw ConfigError("unknown split mode '" + s + "'");
}

struct StartSamplerConfig {
  double p_std = 1.0;  // probability of the standard initial position
  std::string puzzle_file;
  bool include_intermediate = false;
  SplitMode split = SplitMode::kNone;
  double test_fraction = 0.5;
  std::uint64_t split_seed = 0;
};

struct TrainConfig {
  // Game and model.
  std::string game = "tictactoe";
  int history_length = 0;
  Backend backend = Backend::kMlp;
  std::vector<int> hidden = {64, 64};
  // Team.
  int n_players = 5;
  bool diversity = true;
  double lambda = 0.7;
  double l0 = 0.0;  // <= 0 selects the default 0.3 sqrt(D)
  double beta = 0.99;
  int n_td = 4;
  MatchmakerKind matchmaker = MatchmakerKind::kPsroNash;
  int graph_refresh_games = 256;
  // Search and acting.
  int n_simulations = 100;
  double c_base = 19652.0;
  double c_init = 1.25;
  int temperature_cutoff = -1;  // < 0 selects the game default
  bool root_noise = false;
  bool exploration_variant = false;
  double exploration_tau = 10.0;
  int exploration_moves = 15;
  bool reference_search = false;
  // Learner.
  std::int64_t total_steps = 50000;
  int batch_size = 256;
  std::int64_t replay_capacity = 100000;
  double keep_probability = 1.0;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double l2 = 1e-4;
  double intrinsic_weight = 1.0;
  double history_dropout = 0.0;
  int games_per_iteration = 8;
  int updates_per_iteration = 8;
  // Bookkeeping.
  std::int64_t checkpoint_every = 1000;
  std::int64_t psi_sync_every = 0;  // actors' psi refresh period; 0: checkpoint_every
  std::int64_t log_every = 100;
  int workers = 1;
  std::uint64_t seed = 0;
  StartSamplerConfig start;

  const GameSpec& spec() const { return GameSpec::FromId(game, history_length); }
  int cutoff() const {
    return temperature_cutoff >= 0 ? temperature_cutoff
                                   : spec().temperature_cutoff;
  }
  double effective_l0() const {
    return l0 > 0.0 ? l0 : DefaultL0(spec().feature_dim());
  }
  bool diversity_active() const { return diversity && n_players >= 2; }
  std::int64_t psi_sync() const {
    return psi_sync_every > 0 ? psi_sync_every : checkpoint_every;
  }

  void Validate() const {
    auto require = [](bool ok, const std::string& field, const std::string& why) {
      if (!ok) throw ConfigError("config field '" + field + "': " + why);
    };
    require(game == "tictactoe" || game == "connect4", "game",
            "must be tictactoe or connect4");
    require(history_length >= 0, "history_length", "must be >= 0");
    require(!hidden.empty(), "hidden", "needs at least one layer");
    for (int h : hidden) require(h > 0, "hidden", "widths must be positive");
    require(n_players >= 1, "n_players", "must be >= 1");
    require(lambda >= 0.0 && lambda <= 1.0, "lambda", "must lie in [0, 1]");
    require(beta > 0.0 && beta < 1.0, "beta", "must lie in (0, 1)");
    require(n_td > 0 && n_td % 2 == 0, "n_td", "must be a positive even integer");
    require(graph_refresh_games >= 1, "graph_refresh_games", "must be >= 1");
    require(n_simulations >= 1, "n_simulations", "must be >= 1");
    require(c_base > 0.0, "c_base", "must be positive");
    require(c_init >= 0.0, "c_init", "must be non-negative");
    require(exploration_tau > 0.0, "exploration_tau", "must be positive");
    require(exploration_moves >= 0, "exploration_moves", "must be >= 0");
    require(!(reference_search && diversity_active()), "reference_search",
            "needs diversity disabled or a team of one");
    require(total_steps >= 0, "total_steps", "must be >= 0");
    require(batch_size >= 1, "batch_size", "must be >= 1");
    require(replay_capacity >= batch_size, "replay_capacity",
            "must be >= batch_size");
    require(keep_probability >= 0.0 && keep_probability <= 1.0,
            "keep_probability", "must lie in [0, 1]");
    require(keep_probability > 0.0 || total_steps == 0, "keep_probability",
            "0 leaves the replay empty, so no training step can run");
    require(learning_rate >= 0.0, "learning_rate", "must be >= 0");
    require(momentum >= 0.0 && momentum < 1.0, "momentum", "must lie in [0, 1)");
    require(l2 >= 0.0, "l2", "must be >= 0");
    require(intrinsic_weight >= 0.0, "intrinsic_weight", "must be >= 0");
    require(history_dropout >= 0.0 && history_dropout <= 1.0, "history_dropout",
            "must lie in [0, 1]");
    require(games_per_iteration >= 1, "games_per_iteration", "must be >= 1");
    require(updates_per_iteration >= 1, "updates_per_iteration", "must be >= 1");
    require(checkpoint_every >= 1, "checkpoint_every", "must be >= 1");
    require(psi_sync_every >= 0, "psi_sync_every", "must be >= 0");
    require(log_every >= 1, "log_every", "must be >= 1");
    require(workers >= 1, "workers", "must be >= 1");
    require(start.p_std >= 0.0 && start.p_std <= 1.0, "start_p_std",
            "must lie in [0, 1]");
    require(start.p_std == 1.0 || !start.puzzle_file.empty(), "start_puzzle_file",
            "required when start_p_std < 1");
    require(start.test_fraction > 0.0 && start.test_fraction < 1.0,
            "start_test_fraction", "must lie in (0, 1)");
  }

  static TrainConfig FromKeyValues(KeyValueConfig& kv) {
    TrainConfig c;
    c.game = kv.GetString("game", c.game);
    c.history_length = static_cast<int>(kv.GetInt("history_length", c.history_length));
    c.backend = ParseBackend(kv.GetString("backend", BackendName(c.backend)));
    c.hidden = kv.GetIntList("hidden", c.hidden);
    c.n_players = static_cast<int>(kv.GetInt("n_players", c.n_players));
    c.diversity = kv.GetBool("diversity", c.diversity);
    c.lambda = kv.GetDouble("lambda", c.lambda);
    c.l0 = kv.GetDouble("l0", c.l0);
    c.beta = kv.GetDouble("beta", c.beta);
    c.n_td = static_cast<int>(kv.GetInt("n_td", c.n_td));
    c.matchmaker = ParseMatchmaker(kv.GetString("matchmaker", MatchmakerName(c.matchmaker)));
    c.graph_refresh_games =
        static_cast<int>(kv.GetInt("graph_refresh_games", c.graph_refresh_games));
    c.n_simulations = static_cast<int>(kv.GetInt("n_simulations", c.n_simulations));
    c.c_base = kv.GetDouble("c_base", c.c_base);
    c.c_init = kv.GetDouble("c_init", c.c_init);
    c.temperature_cutoff =
        static_cast<int>(kv.GetInt("temperature_cutoff", c.temperature_cutoff));
    c.root_noise = kv.GetBool("root_noise", c.root_noise);
    c.exploration_variant = kv.GetBool("exploration_variant", c.exploration_variant);
    c.exploration_tau = kv.GetDouble("exploration_tau", c.exploration_tau);
    c.exploration_moves =
        static_cast<int>(kv.GetInt("exploration_moves", c.exploration_moves));
    c.reference_search = kv.GetBool("reference_search", c.reference_search);
    c.total_steps = kv.GetInt("total_steps", c.total_steps);
    c.batch_size = static_cast<int>(kv.GetInt("batch_size", c.batch_size));
    c.replay_capacity = kv.GetInt("replay_capacity", c.replay_capacity);
    c.keep_probability = kv.GetDouble("keep_probability", c.keep_probability);
    c.learning_rate = kv.GetDouble("learning_rate", c.learning_rate);
    c.momentum = kv.GetDouble("momentum", c.momentum);
    c.l2 = kv.GetDouble("l2", c.l2);
    c.intrinsic_weight = kv.GetDouble("intrinsic_weight", c.intrinsic_weight);
    c.history_dropout = kv.GetDouble("history_dropout", c.history_dropout);
    c.games_per_iteration =
        static_cast<int>(kv.GetInt("games_per_iteration", c.games_per_iteration));
    c.updates_per_iteration =
        static_cast<int>(kv.GetInt("updates_per_iteration", c.updates_per_iteration));
    c.checkpoint_every = kv.GetInt("checkpoint_every", c.checkpoint_every);
    c.psi_sync_every = kv.GetInt("psi_sync_every", c.psi_sync_every);
    c.log_every = kv.GetInt("log_every", c.log_every);
    c.workers = static_cast<int>(kv.GetInt("workers", c.workers));
    c.seed = kv.GetUint("seed", c.seed);
    c.start.p_std = kv.GetDouble("start_p_std", c.start.p_std);
    c.start.puzzle_file = kv.GetString("start_puzzle_file", c.start.puzzle_file);
    c.start.include_intermediate =
        kv.GetBool("start_include_intermediate", c.start.include_intermediate);
    c.start.split = ParseSplitMode(kv.GetString("start_split", SplitModeName(c.start.split)));
    c.start.test_fraction = kv.GetDouble("start_test_fraction", c.start.test_fraction);
    c.start.split_seed = kv.GetUint("start_split_seed", c.start.split_seed);
    kv.CheckAllUsed();
    c.Validate();
    return c;
  }

  static TrainConfig Parse(const std::string& text) {
    KeyValueConfig kv = KeyValueConfig::Parse(text);
    return FromKeyValues(kv);
  }

  // Full listing of every field; Parse(ToText()) reproduces the config.
  std::string ToText() const {
    std::ostringstream out;
    char buf[64];
    auto real = [&](const char* key, double x) {
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << key << " = " << buf << "\n";
    };
    auto flag = [&](const char* key, bool b) {
      out << key << " = " << (b ? "true" : "false") << "\n";
    };
    out << "game = " << game << "\n";
    out << "history_length = " << history_length << "\n";
    out << "backend = " << BackendName(backend) << "\n";
    out << "hidden = ";
    for (std::size_t k = 0; k < hidden.size(); ++k) out << (k ? "," : "") << hidden[k];
    out << "\n";
    out << "n_players = " << n_players << "\n";
    flag("diversity", diversity);
    real("lambda", lambda);
    real("l0", l0);
    real("beta", beta);
    out << "n_td = " << n_td << "\n";
    out << "matchmaker = " << MatchmakerName(matchmaker) << "\n";
    out << "graph_refresh_games = " << graph_refresh_games << "\n";
    out << "n_simulations = " << n_simulations << "\n";
    real("c_base", c_base);
    real("c_init", c_init);
    out << "temperature_cutoff = " << temperature_cutoff << "\n";
    flag("root_noise", root_noise);
    flag("exploration_variant", exploration_variant);
    real("exploration_tau", exploration_tau);
    out << "exploration_moves = " << exploration_moves << "\n";
    flag("reference_search", reference_search);
    out << "total_steps = " << total_steps << "\n";
    out << "batch_size = " << batch_size << "\n";
    out << "replay_capacity = " << replay_capacity << "\n";
    real("keep_probability", keep_probability);
    real("learning_rate", learning_rate);
    real("momentum", momentum);
    real("l2", l2);
    real("intrinsic_weight", intrinsic_weight);
    real("history_dropout", history_dropout);
    out << "games_per_iteration = " << games_per_iteration << "\n";
    out << "updates_per_iteration = " << updates_per_iteration << "\n";
    out << "checkpoint_every = " << checkpoint_every << "\n";
    out << "psi_sync_every = " << psi_sync_every << "\n";
    out << "log_every = " << log_every << "\n";
    out << "workers = " << workers << "\n";
    out << "seed = " << seed << "\n";
    real("start_p_std", start.p_std);
    out << "start_puzzle_file = " << start.puzzle_file << "\n";
    flag("start_include_intermediate", start.include_intermediate);
    out << "start_split = " << SplitModeName(start.split) << "\n";
    real("start_test_fraction", start.test_fraction);
    out << "start_split_seed = " << start.split_seed << "\n";
    return out.str();
  }
};

// ---------------------------------------------------------------------------
// Replay

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be > 0");
  }

  void Add(TrainSample sample) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.push_back(std::move(sample));
    ++total_added_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_added() const { return total_added_; }
  const TrainSample& at(std::size_t k) const { return items_.at(k); }

  // Uniform with replacement.
  std::vector<TrainSample> Sample(std::size_t n, Rng& rng) const {
    if (items_.empty()) throw std::logic_error("sampling from an empty replay");
    std::vector<TrainSample> batch;
    batch.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      batch.push_back(items_[rng.UniformInt(items_.size())]);
    }
    return batch;
  }

 private:
  std::size_t capacity_;
  std::deque<TrainSample> items_;
  std::uint64_t total_added_ = 0;
};

// Each sample is kept independently with probability `keep`.
inline std::size_t StoreTransitions(ReplayBuffer& buffer,
                                    const std::vector<TrainSample>& samples,
                                    double keep, Rng& rng) {
  if (!(keep >= 0.0 && keep <= 1.0)) {
    throw std::invalid_argument("keep probability must lie in [0, 1]");
  }
  std::size_t stored = 0;
  for (const auto& s : samples) {
    if (rng.Bernoulli(keep)) {
      buffer.Add(s);
      ++stored;
    }
  }
  return stored;
}

// ---------------------------------------------------------------------------
// Start positions

// A candidate start position, with the positions along its solution line
// (used when intermediate positions are enabled) and its family label.
struct StartCandidate {
  GameState position;
  std::string family;
  std::vector<GameState> line;
};

struct SplitResult {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// kNone: train and test are both the full set. kRandom: a seeded shuffle puts
// round(test_fraction * n) candidates in test. kHeldOutFamily: whole families
// go to test, chosen by a seeded shuffle of the sorted family names, until
// the test share reaches test_fraction.
inline SplitResult SplitCandidates(const std::vector<StartCandidate>& pool,
                                   SplitMode mode, double test_fraction,
                                   std::uint64_t split_seed) {
  SplitResult r;
  const std::size_t n = pool.size();
  if (mode == SplitMode::kNone) {
    for (std::size_t k = 0; k < n; ++k) {
      r.train.push_back(k);
      r.test.push_back(k);
    }
    return r;
  }
  Rng rng(DeriveSeed(split_seed, 0x5B117));
  std::vector<bool> is_test(n, false);
  if (mode == SplitMode::kRandom) {
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    rng.Shuffle(order);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
    for (std::size_t k = 0; k < n_test; ++k) is_test[order[k]] = true;
  } else {
    std::vector<std::string> families;
    for (const auto& c : pool) families.push_back(c.family);
    std::sort(families.begin(), families.end());
    families.erase(std::unique(families.begin(), families.end()), families.end());
    rng.Shuffle(families);
    std::size_t taken = 0;
    for (const auto& f : families) {
      if (taken >= test_fraction * n) break;
      for (std::size_t k = 0; k < n; ++k) {
        if (pool[k].family == f) {
          is_test[k] = true;
          ++taken;
        }
      }
    }
  }
  for (std::size_t k = 0; k < n; ++k) (is_test[k] ? r.test : r.train).push_back(k);
  return r;
}

class StartSampler {
 public:
  // `eligible` are indices into `pool` that training may start from.
  StartSampler(const GameSpec& spec, const StartSamplerConfig& config,
               const std::vector<StartCandidate>& pool,
               const std::vector<std::size_t>& eligible)
      : spec_(&spec), p_std_(config.p_std) {
    for (const auto& c : pool) {
      if (c.position.spec().id != spec.id) {
        throw ConfigError("start-position pool holds '" + c.position.spec().id +
                          "' positions but the game is '" + spec.id + "'");
      }
    }
    for (std::size_t k : eligible) {
      positions_.push_back(pool.at(k).position);
      if (config.include_intermediate) {
        for (const auto& s : pool[k].line) {
          if (!s.IsTerminal()) positions_.push_back(s);
        }
      }
    }
    if (p_std_ < 1.0 && positions_.empty()) {
      throw ConfigError("start-position pool is empty while start_p_std < 1");
    }
  }

  GameState Sample(Rng& rng) const {
    if (p_std_ >= 1.0 || rng.Bernoulli(p_std_)) return GameState::Initial(*spec_);
    return positions_[rng.UniformInt(positions_.size())];
  }

  const std::vector<GameState>& positions() const { return positions_; }

 private:
  const GameSpec* spec_;
  double p_std_;
  std::vector<GameState> positions_;
};

// ---------------------------------------------------------------------------
// Self-play

struct ActingConfig {
  SearchConfig search;
  bool reference_search = false;
  int temperature_cutoff = 0;
  bool exploration_variant = false;
  double exploration_tau = 10.0;
  int exploration_moves = 15;
};

inline ActingConfig MakeActingConfig(const TrainConfig& c) {
  ActingConfig a;
  a.search.n_simulations = c.n_simulations;
  a.search.c_base = c.c_base;
  a.search.c_init = c.c_init;
  a.search.diversity = c.diversity_active();
  a.search.root_noise = c.root_noise;
  a.reference_search = c.reference_search;
  a.temperature_cutoff = c.cutoff();
  a.exploration_variant = c.exploration_variant;
  a.exploration_tau = c.exploration_tau;
  a.exploration_moves = c.exploration_moves;
  return a;
}

inline SearchResult SearchFor(const GameState& state, int latent,
                              const Evaluator& evaluator, const TeamState& team,
                              const ActingConfig& acting, Rng& rng) {
  if (acting.reference_search) {
    reference::VanillaMcts mcts(evaluator, acting.search.n_simulations,
                                acting.search.c_base, acting.search.c_init);
    return mcts.Run(state, latent, rng);
  }
  SearchConfig cfg = acting.search;
  cfg.lambda = team.lambda.at(latent);
  return RunSearch(state, latent, evaluator, &team, cfg, rng);
}

// Plays one game from `start`. The seat given by `matchup.seat` is played by
// the exploiter's latent, the other seat by the exploitee's. Each step
// records the search policy, phi and the acting player's r_d under the frozen
// team state.
inline Trajectory SelfPlayGame(const Matchup& matchup, const Evaluator& evaluator,
                               const TeamState& team, const ActingConfig& acting,
                               const GameState& start, Rng& rng) {
  Trajectory t;
  GameState s = start;
  const Player exploiter_side =
      matchup.seat == Seat::kFirst ? Player::kP1 : Player::kP2;
  int ply = 0;
  while (!s.IsTerminal()) {
    const int latent =
        s.to_move() == exploiter_side ? matchup.exploiter : matchup.exploitee;
    const SearchResult r = SearchFor(s, latent, evaluator, team, acting, rng);
    std::vector<double> counts;
    for (const auto& m : r.moves) counts.push_back(m.n);
    std::size_t pick;
    if (acting.exploration_variant) {
      pick = ply < acting.exploration_moves
                 ? SelectWithTemperature(counts, acting.exploration_tau, rng)
                 : ArgmaxRandomTie(counts, rng);
    } else {
      pick = SelectFromCounts(counts, ply, acting.temperature_cutoff, rng);
    }
    TrajectoryStep step{s, r.moves[pick].move, latent, s.to_move(), {}, 0.0,
                        r.root_eval.v_d, r.root_value, r.pi};
    step.phi = FeatureMap(s, step.move);
    if (acting.search.diversity) {
      step.r_d = PlayerIntrinsicReward(team, latent, step.phi);
    }
    s = s.ApplyMove(step.move);
    t.steps.push_back(std::move(step));
    ++ply;
  }
  t.outcome = *s.TerminalOutcome();
  t.final_state = s;
  return t;
}

// Training samples for every step of a trajectory: z from the mover's
// perspective, pi from the search, z_d from the n-step intrinsic return (zero
// when diversity is off).
inline std::vector<TrainSample> BuildSamples(const Trajectory& t, int n_td,
                                             bool diversity) {
  std::vector<TrainSample> out;
  out.reserve(t.steps.size());
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const auto& step = t.steps[k];
    TrainTarget target;
    target.pi = step.pi;
    target.z = t.outcome.For(step.side);
    target.z_d = diversity ? IntrinsicValueTarget(t, k, n_td) : 0.0;
    target.latent = step.latent;
    out.push_back(TrainSample{step.state, std::move(target)});
  }
  return out;
}

inline bool ExploiterOwns(const Matchup& m, Player side) {
  if (m.exploiter == m.exploitee) return true;
  return side == (m.seat == Seat::kFirst ? Player::kP1 : Player::kP2);
}

// ---------------------------------------------------------------------------
// Metrics

struct MetricsRow {
  std::int64_t step = 0;
  std::int64_t games = 0;
  LossBreakdown loss;
  double mean_abs_rd = 0.0;
  std::size_t replay_size = 0;
  std::vector<double> psi_distances;  // pairs (i < j), row-major
};

inline std::string MetricsHeader(int n_players) {
  std::string h =
      "schema,step,games,loss_total,loss_value,loss_intrinsic,loss_policy,loss_l2,"
      "mean_abs_rd,replay_size";
  for (int i = 0; i < n_players; ++i) {
    for (int j = i + 1; j < n_players; ++j) {
      h += ",psi_dist_" + std::to_string(i) + "_" + std::to_string(j);
    }
  }
  return h;
}

inline std::string FormatMetrics(const MetricsRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "metrics.v1,%lld,%lld,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%zu",
                static_cast<long long>(r.step), static_cast<long long>(r.games),
                r.loss.total, r.loss.value, r.loss.intrinsic, r.loss.policy,
                r.loss.l2, r.mean_abs_rd, r.replay_size);
  std::string line = buf;
  for (double d : r.psi_distances) {
    std::snprintf(buf, sizeof(buf), ",%.10g", d);
    line += buf;
  }
  return line;
}

// ---------------------------------------------------------------------------
// Learner

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Trainer {
 public:
  using MetricsCallback = std::function<void(const MetricsRow&)>;
  using CheckpointCallback = std::function<void(const Trainer&, std::int64_t)>;
  // Called after each game is processed, with the samples offered to the
  // replay (before subsampling).
  using GameCallback = std::function<void(const Matchup&, const Trajectory&,
                                          const std::vector<TrainSample>&)>;

  Trainer(TrainConfig config, std::vector<StartCandidate> pool = {})
      : config_(std::move(config)),
        spec_(&config_.spec()),
        pool_(std::move(pool)),
        split_(SplitCandidates(pool_, config_.start.split,
                               config_.start.test_fraction,
                               config_.start.split_seed)),
        sampler_(*spec_, config_.start, pool_, split_.train),
        model_(MakeModel(config_.backend, *spec_, config_.n_players,
                         config_.hidden, DeriveSeed(config_.seed, 1))),
        team_(TeamState::Make(config_.n_players, spec_->feature_dim(),
                              config_.lambda, config_.effective_l0(),
                              config_.beta)),
        payoffs_(config_.n_players),
        replay_(static_cast<std::size_t>(config_.replay_capacity)),
        rng_(DeriveSeed(config_.seed, 2)),
        acting_(MakeActingConfig(config_)) {
    config_.Validate();
    actor_team_ = team_;
    graphs_ = BuildGraphs(config_.matchmaker, payoffs_, config_.n_players);
  }

  void set_metrics_callback(MetricsCallback cb) { on_metrics_ = std::move(cb); }
  void set_checkpoint_callback(CheckpointCallback cb) {
    on_checkpoint_ = std::move(cb);
  }
  void set_game_callback(GameCallback cb) { on_game_ = std::move(cb); }

  // Runs until `total_steps` SGD steps have been taken.
  void Run() {
    while (step_ < config_.total_steps) RunIteration();
  }

  void RunIteration() {
    PlayGames();
    const std::int64_t n_updates = std::min<std::int64_t>(
        config_.updates_per_iteration, config_.total_steps - step_);
    if (replay_.size() == 0) return;
    UpdateOptions opts;
    opts.learning_rate = config_.learning_rate;
    opts.momentum = config_.momentum;
    opts.loss.l2 = config_.l2;
    opts.loss.intrinsic_weight = config_.intrinsic_weight;
    opts.history_dropout = config_.history_dropout;
    for (std::int64_t k = 0; k < n_updates; ++k) {
      const auto batch = replay_.Sample(config_.batch_size, rng_);
      LossBreakdown loss;
      try {
        loss = model_->Update(batch, opts, &rng_);
      } catch (const NumericalError& e) {
        throw TrainingError("step " + std::to_string(step_) + ": " + e.what());
      }
      ++step_;
      Accumulate(loss);
      if (step_ % config_.psi_sync() == 0) actor_team_ = team_;
      if (step_ % config_.log_every == 0) EmitMetrics();
      if (step_ % config_.checkpoint_every == 0 && on_checkpoint_) {
        on_checkpoint_(*this, step_);
      }
    }
  }

  const TrainConfig& config() const { return config_; }
  const Model& model() const { return *model_; }
  Model& mutable_model() { return *model_; }
  const TeamState& team() const { return team_; }
  const PayoffTable& payoffs() const { return payoffs_; }
  const GraphPair& graphs() const { return graphs_; }
  const ReplayBuffer& replay() const { return replay_; }
  const std::vector<MetricsRow>& metrics() const { return metrics_; }
  const std::vector<StartCandidate>& pool() const { return pool_; }
  const SplitResult& split() const { return split_; }
  std::int64_t step() const { return step_; }
  std::int64_t games() const { return games_; }

 private:
  struct PendingGame {
    Matchup matchup;
    GameState start;
    std::uint64_t seed = 0;
  };

  void PlayGames() {
    std::vector<PendingGame> pending;
    for (int g = 0; g < config_.games_per_iteration; ++g) {
      PendingGame p{SampleMatchup(config_.matchmaker, graphs_, config_.n_players, rng_),
                    sampler_.Sample(rng_),
                    DeriveSeed(config_.seed, 1000 + games_ + g)};
      pending.push_back(std::move(p));
    }
    const std::unique_ptr<Model> snapshot = model_->Clone();
    const TeamState& team = actor_team_;
    std::vector<Trajectory> results(pending.size());
    std::vector<std::exception_ptr> errors(pending.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t g; (g = next.fetch_add(1)) < pending.size();) {
        try {
          Rng game_rng(pending[g].seed);
          results[g] = SelfPlayGame(pending[g].matchup, *snapshot, team, acting_,
                                    pending[g].start, game_rng);
        } catch (...) {
          errors[g] = std::current_exception();
        }
      }
    };
    const int n_threads =
        std::min<int>(config_.workers, static_cast<int>(pending.size()));
    if (n_threads <= 1) {
      work();
    } else {
      std::vector<std::thread> threads;
      for (int w = 0; w < n_threads; ++w) threads.emplace_back(work);
      for (auto& th : threads) th.join();
    }
    for (std::size_t g = 0; g < pending.size(); ++g) {
      if (errors[g]) {
        try {
          std::rethrow_exception(errors[g]);
        } catch (const std::exception& e) {
          throw TrainingError("self-play game " + std::to_string(games_ + g) +
                              " from '" + pending[g].start.Serialize() +
                              "': " + e.what());
        }
      }
    }
    for (std::size_t g = 0; g < pending.size(); ++g) {
      ProcessGame(pending[g].matchup, results[g]);
    }
  }

  void ProcessGame(const Matchup& m, const Trajectory& t) {
    // t.outcome is from P1's view, and P1 is the first seat.
    payoffs_.Record(m, t.outcome.z);
    Trajectory own;
    own.outcome = t.outcome;
    own.steps = FilterExperience(m, t.steps);
    UpdateOccupancy(team_, own, m.exploiter);
    const auto samples = BuildSamples(t, config_.n_td, config_.diversity_active());
    std::vector<TrainSample> kept;
    for (std::size_t k = 0; k < samples.size(); ++k) {
      if (!ExploiterOwns(m, t.steps[k].side)) continue;
      kept.push_back(samples[k]);
      rd_sum_ += std::abs(t.steps[k].r_d);
      ++rd_count_;
    }
    if (on_game_) on_game_(m, t, kept);
    StoreTransitions(replay_, kept, config_.keep_probability, rng_);
    ++games_;
    if (games_ % config_.graph_refresh_games == 0) {
      graphs_ = BuildGraphs(config_.matchmaker, payoffs_, config_.n_players);
    }
  }

  void Accumulate(const LossBreakdown& l) {
    acc_.total += l.total;
    acc_.value += l.value;
    acc_.intrinsic += l.intrinsic;
    acc_.policy += l.policy;
    acc_.l2 += l.l2;
    ++acc_n_;
  }

  void EmitMetrics() {
    MetricsRow row;
    row.step = step_;
    row.games = games_;
    const double n = acc_n_ > 0 ? static_cast<double>(acc_n_) : 1.0;
    row.loss.total = acc_.total / n;
    row.loss.value = acc_.value / n;
    row.loss.intrinsic = acc_.intrinsic / n;
    row.loss.policy = acc_.policy / n;
    row.loss.l2 = acc_.l2 / n;
    row.mean_abs_rd = rd_count_ > 0 ? rd_sum_ / rd_count_ : 0.0;
    row.replay_size = replay_.size();
    for (int i = 0; i < team_.n_players; ++i) {
      for (int j = i + 1; j < team_.n_players; ++j) {
        row.psi_distances.push_back(
            std::sqrt(SquaredDistance(team_.psi[i], team_.psi[j])));
      }
    }
    metrics_.push_back(row);
    if (on_metrics_) on_metrics_(row);
    acc_ = LossBreakdown{};
    acc_n_ = 0;
    rd_sum_ = 0.0;
    rd_count_ = 0;
  }

  TrainConfig config_;
  const GameSpec* spec_;
  std::vector<StartCandidate> pool_;
  SplitResult split_;
  StartSampler sampler_;
  std::unique_ptr<Model> model_;
  TeamState team_;
  TeamState actor_team_;  // psi snapshot the actors search with
  PayoffTable payoffs_;
  GraphPair graphs_;
  ReplayBuffer replay_;
  Rng rng_;
  ActingConfig acting_;
  std::int64_t step_ = 0;
  std::int64_t games_ = 0;
  LossBreakdown acc_;
  std::int64_t acc_n_ = 0;
  double rd_sum_ = 0.0;
  std::int64_t rd_count_ = 0;
  std::vector<MetricsRow> metrics_;
  MetricsCallback on_metrics_;
  CheckpointCallback on_checkpoint_;
  GameCallback on_game_;
};

}  // namespace teamzero

#endif  // TEAMZERO_TRAINING_HPP_
