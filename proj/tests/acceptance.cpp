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

// Acceptance report: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "experiments.hpp"
#include "oracles.hpp"
#include "teamzero/diversity.hpp"
#include "teamzero/evaluator.hpp"
#include "teamzero/league.hpp"
#include "teamzero/match.hpp"
#include "teamzero/nash.hpp"
#include "teamzero/reference_search.hpp"
#include "teamzero/search.hpp"
#include "teamzero/subadditive.hpp"
#include "teamzero/training.hpp"

namespace teamzero {
namespace {

using Verdict = experiments::Outcome;

std::string Num(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

// 1. Elo values published in the matchup summary table.
Verdict EloTable() {
  const std::vector<std::pair<double, double>> table = {
      {0.5425, 29.6}, {0.5718, 50.3}, {0.586, 60.3}};
  double worst = 0.0;
  for (auto [w, elo] : table) worst = std::max(worst, std::abs(WinrateToElo(w) - elo));
  return {worst <= 0.1, "max |elo - published| = " + Num(worst)};
}

// 2. Finite-difference gradient of the pair term vs the intrinsic reward.
Verdict GradientIdentity() {
  Rng rng(2);
  const int d = 12, n = 6;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    TeamState team = TeamState::Make(n, d, 0.7, 0.2 + 2.0 * rng.Uniform(), 0.99);
    for (auto& psi : team.psi) {
      for (double& x : psi) x = 0.5 * rng.Normal();
    }
    const int i = static_cast<int>(rng.UniformInt(n));
    const int j = NearestRival(i, team);
    const auto numeric = oracle::NumericalGradient(
        [&](const std::vector<double>& psi_i) {
          return PairUtility(std::sqrt(SquaredDistance(psi_i, team.psi[j])), team.l0);
        },
        team.psi[i], 1e-6);
    std::vector<double> reward(d);
    for (int k = 0; k < d; ++k) {
      std::vector<double> basis(d, 0.0);
      basis[k] = 1.0;
      reward[k] = IntrinsicReward(basis, team.psi[i], team.psi[j], team.l0);
    }
    worst = std::max(worst, oracle::VectorRelativeError(reward, numeric));
  }
  return {worst <= 1e-5, "200 configs, max relative error " + Num(worst, 3)};
}

// 3. Zero reward at d = l0 and d = 0; pair utility peaks at l0.
Verdict Equilibrium() {
  Rng rng(3);
  int nonzero = 0, scans_off = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int d = 2 + static_cast<int>(rng.UniformInt(12));
    const double l0 = 0.05 + 3.0 * rng.Uniform();
    std::vector<double> phi(d), zero(d, 0.0), at_l0(d, 0.0), same(d);
    for (double& x : phi) x = rng.Normal();
    for (double& x : same) x = rng.Normal();
    at_l0[rng.UniformInt(d)] = l0;
    nonzero += IntrinsicReward(phi, at_l0, zero, l0) != 0.0;
    nonzero += IntrinsicReward(phi, same, same, l0) != 0.0;
    int best = 1;
    for (int k = 2; k <= 1000; ++k) {
      if (PairUtility(2.0 * l0 * k / 1000.0, l0) > PairUtility(2.0 * l0 * best / 1000.0, l0)) {
        best = k;
      }
    }
    scans_off += best != 500;
  }
  return {nonzero == 0 && scans_off == 0,
          std::to_string(nonzero) + " nonzero rewards, " + std::to_string(scans_off) +
              " scans off l0 (500 configs)"};
}

class UniformEvaluator : public Evaluator {
 public:
  EvalOutput Evaluate(const GameState& s, int) const override {
    EvalOutput out;
    out.p.assign(s.spec().num_moves(), 0.0);
    const auto legal = s.LegalMoves();
    for (MoveId m : legal) out.p[m] = 1.0 / legal.size();
    return out;
  }
  int n_players() const override { return 1; }
};

// Result proven by a two-ply lookahead: an immediate win, or every move
// hands the opponent an immediate win.
bool ForcedWithinTwoPlies(const GameState& s) {
  bool all_lose = true;
  for (MoveId m : s.LegalMoves()) {
    const GameState next = s.ApplyMove(m);
    if (auto o = next.TerminalOutcome()) {
      if (o->z != 0) return true;
      all_lose = false;
      continue;
    }
    bool reply_wins = false;
    for (MoveId r : next.LegalMoves()) {
      auto o = next.ApplyMove(r).TerminalOutcome();
      reply_wins |= o && o->z != 0;
    }
    all_lose &= reply_wins;
  }
  return all_lose;
}

// 4. Greedy MCTS move is minimax-optimal on forced positions.
Verdict SearchVsOracle() {
  const GameSpec& ttt = GameSpec::Get(GameKind::kTicTacToe);
  oracle::MemoSolver oracle;
  UniformEvaluator eval;
  SearchConfig cfg;
  cfg.n_simulations = 10000;
  Rng rng(4);
  int total = 0, agree = 0, all = 0, all_agree = 0;
  for (const auto& s : ReachableStates(ttt)) {
    if (s.IsTerminal()) continue;
    const auto best = oracle.OptimalMoves(s);
    const MoveId pick = SelectGreedy(RunSearch(s, 0, eval, nullptr, cfg, rng), rng);
    const bool ok = std::find(best.begin(), best.end(), pick) != best.end();
    ++all;
    all_agree += ok;
    if (ForcedWithinTwoPlies(s)) {
      ++total;
      agree += ok;
    }
  }
  const double rate = static_cast<double>(agree) / total;
  return {rate >= 0.99, std::to_string(agree) + "/" + std::to_string(total) +
                            " forced positions optimal (" + Num(100 * rate) + "%); all " +
                            std::to_string(all) + " decision points: " +
                            Num(100.0 * all_agree / all) + "%"};
}

double Exploitability(const DenseMatrix& a, const std::vector<double>& x,
                      const std::vector<double>& y) {
  double best_row = -1e300, best_col = 1e300;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) v += a[i][j] * y[j];
    best_row = std::max(best_row, v);
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) v += x[i] * a[i][j];
    best_col = std::min(best_col, v);
  }
  return best_row - best_col;
}

// 5. Nash solver vs fictitious play.
Verdict NashSolver() {
  double worst_expl = 0.0, worst_gap = 0.0;
  const DenseMatrix rps{{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}};
  auto sol = SolveNash(rps);
  worst_expl = Exploitability(rps, sol.row, sol.col);
  worst_gap = std::abs(sol.value);
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    DenseMatrix a(5, std::vector<double>(5));
    for (auto& row : a) {
      for (double& x : row) x = 2.0 * rng.Uniform() - 1.0;
    }
    sol = SolveNash(a);
    worst_expl = std::max(worst_expl, Exploitability(a, sol.row, sol.col));
    const auto fp = oracle::FictitiousPlay(a, 2e-4, 20000000);
    worst_gap = std::max(worst_gap, std::abs(sol.value - fp.value()));
  }
  return {worst_expl <= 1e-6 && worst_gap <= 1e-4,
          "max exploitability " + Num(worst_expl, 3) + ", max |value - fp| " + Num(worst_gap, 3)};
}

// 6. Interaction graph fixtures for N = 4.
Verdict GraphFixtures() {
  const double t = 1.0 / 3.0;
  const std::map<MatchmakerKind, DenseMatrix> fixtures = {
      {MatchmakerKind::kSelfPlay, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}},
      {MatchmakerKind::kUniform, DenseMatrix(4, std::vector<double>(4, 0.25))},
      {MatchmakerKind::kFictitiousPlay,
       {{1, 0, 0, 0}, {0.5, 0.5, 0, 0}, {t, t, t, 0}, {0.25, 0.25, 0.25, 0.25}}},
  };
  int mismatches = 0;
  PayoffTable empty(4);
  for (const auto& [kind, want] : fixtures) {
    for (const auto& g : BuildGraphs(kind, empty, 4)) mismatches += g.sigma != want;
  }
  Rng rng(6);
  int bad_rows = 0, rows = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformInt(8));
    PayoffTable table(n);
    for (int g = 0; g < 300; ++g) {
      table.Record(Matchup{static_cast<int>(rng.UniformInt(n)), static_cast<int>(rng.UniformInt(n)),
                           static_cast<Seat>(rng.UniformInt(2))},
                   static_cast<int>(rng.UniformInt(3)) - 1);
    }
    for (auto kind : {MatchmakerKind::kPsroNash, MatchmakerKind::kPsroRectified}) {
      for (const auto& g : BuildGraphs(kind, table, n)) {
        for (int i = 0; i < n; ++i) {
          ++rows;
          double sum = 0.0;
          bool ok = true;
          for (int j = 0; j < n; ++j) {
            sum += g.sigma[i][j];
            ok &= g.sigma[i][j] >= 0.0 && (j <= i || g.sigma[i][j] == 0.0);
          }
          bad_rows += !ok || std::abs(sum - 1.0) > 1e-9;
        }
      }
    }
  }
  return {mismatches == 0 && bad_rows == 0,
          std::to_string(mismatches) + " fixture mismatches, " + std::to_string(bad_rows) + "/" +
              std::to_string(rows) + " bad PSRO rows"};
}

// 7. Sub-additive selection algebra on random stat sets.
Verdict SelectionAlgebra() {
  Rng rng(7);
  const SelectionRule rules[] = {SelectionRule::kVisit, SelectionRule::kValue,
                                 SelectionRule::kLcb, SelectionRule::kGap};
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.UniformInt(6));
    std::vector<PlayerStats> stats(n), scaled(n);
    const double c = 0.1 + 10.0 * rng.Uniform();
    for (int i = 0; i < n; ++i) {
      const int moves = 1 + static_cast<int>(rng.UniformInt(5));
      for (int m = 0; m < moves; ++m) {
        RootMoveStats r{m, 1 + static_cast<int>(rng.UniformInt(100)),
                        2.0 * rng.Uniform() - 1.0, rng.Uniform(), rng.Uniform()};
        stats[i].moves.push_back(r);
        r.q *= c;
        r.u *= c;
        scaled[i].moves.push_back(r);
      }
    }
    std::vector<double> values(n);
    for (int i = 0; i < n; ++i) values[i] = stats[i].Value();
    const double max_v = MaxOverLatents(values);
    for (double v : values) violations += max_v < v;
    for (auto rule : rules) {
      const Selection sel = SubadditiveSelect(stats, rule);
      violations += sel.q > max_v;
      const Selection sel_scaled = SubadditiveSelect(scaled, rule);
      violations += sel.player != sel_scaled.player || sel.move != sel_scaled.move;
    }
    // Random doubles are tie-free with probability one.
    const Selection gap0 = SubadditiveSelect(stats, SelectionRule::kGap, 0.0);
    const Selection value = SubadditiveSelect(stats, SelectionRule::kValue);
    violations += gap0.player != value.player || gap0.move != value.move;
  }
  return {violations == 0, std::to_string(violations) + " violations over 10000 stat sets"};
}

// 8. MLP backprop vs central differences.
Verdict MlpGradients() {
  const GameSpec& spec = GameSpec::Get(GameKind::kTicTacToe, 1);
  const auto states = ReachableStates(spec, 4);
  Rng rng(8);
  double worst = 0.0;
  LossOptions opts;
  for (int trial = 0; trial < 100; ++trial) {
    MlpModel model(spec, 2, {2, 2}, 800 + trial);
    for (double& p : model.params()) p = rng.Normal();
    std::vector<TrainSample> batch;
    while (batch.size() < 3) {
      const auto& s = states[rng.UniformInt(states.size())];
      if (s.IsTerminal()) continue;
      TrainTarget t;
      t.pi.assign(spec.num_moves(), 0.0);
      double total = 0.0;
      for (MoveId m : s.LegalMoves()) total += (t.pi[m] = rng.Uniform() + 0.1);
      for (double& p : t.pi) p /= total;
      t.z = 2.0 * rng.Uniform() - 1.0;
      t.z_d = rng.Normal();
      t.latent = static_cast<int>(rng.UniformInt(2));
      batch.push_back(TrainSample{s, t});
    }
    const auto analytic = model.Gradient(batch, opts);
    const auto numeric = oracle::NumericalGradient(
        [&](const std::vector<double>& theta) {
          MlpModel copy = model;
          copy.params() = theta;
          return copy.Loss(batch, opts).total;
        },
        model.params(), 1e-4);
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      worst = std::max(worst, oracle::RelativeError(analytic[k], numeric[k], 1e-6));
    }
  }
  return {worst <= 1e-4, "100 points, max relative error " + Num(worst, 3)};
}

// 9. One-player team without diversity equals the reference path bitwise.
Verdict VanillaReduction() {
  int search_diffs = 0;
  for (auto kind : {GameKind::kTicTacToe, GameKind::kConnectFour}) {
    const GameSpec& spec = GameSpec::Get(kind);
    MlpModel model(spec, 1, {32, 32}, 9);
    TeamState team = TeamState::Make(1, spec.feature_dim(), 1.0, 1.0, 0.99);
    Rng walk(9);
    GameState s = GameState::Initial(spec);
    while (!s.IsTerminal()) {
      SearchConfig cfg;
      cfg.n_simulations = 200;
      cfg.diversity = false;
      cfg.lambda = team.lambda[0];
      const std::uint64_t seed = walk.NextU64();
      Rng a(seed), b(seed);
      const auto mine = RunSearch(s, 0, model, &team, cfg, a);
      const auto ref = reference::VanillaMcts(model, cfg.n_simulations, cfg.c_base, cfg.c_init)
                           .Run(s, 0, b);
      bool same = mine.pi == ref.pi && mine.root_value == ref.root_value &&
                  mine.moves.size() == ref.moves.size() && a.NextU64() == b.NextU64();
      for (std::size_t k = 0; same && k < mine.moves.size(); ++k) {
        same = mine.moves[k].move == ref.moves[k].move && mine.moves[k].n == ref.moves[k].n &&
               mine.moves[k].q == ref.moves[k].q && mine.moves[k].u == ref.moves[k].u &&
               mine.moves[k].p == ref.moves[k].p;
      }
      search_diffs += !same;
      const auto legal = s.LegalMoves();
      s = s.ApplyMove(legal[walk.UniformInt(legal.size())]);
    }
  }
  auto train = [](bool reference_path) {
    TrainConfig c;
    c.game = "connect4";
    c.n_players = 1;
    c.diversity = false;
    c.reference_search = reference_path;
    c.hidden = {32, 32};
    c.n_simulations = 24;
    c.total_steps = 300;
    c.batch_size = 32;
    c.games_per_iteration = 4;
    c.updates_per_iteration = 4;
    c.log_every = 20;
    c.checkpoint_every = 100;
    c.seed = 99;
    Trainer t(c);
    t.Run();
    std::string text;
    for (const auto& row : t.metrics()) text += FormatMetrics(row) + "\n";
    std::ostringstream params;
    t.model().Save(params);
    return std::make_pair(text, params.str());
  };
  const auto team_run = train(false);
  const auto ref_run = train(true);
  const bool metrics_same = team_run.first == ref_run.first;
  const bool params_same = team_run.second == ref_run.second;
  return {search_diffs == 0 && metrics_same && params_same,
          std::to_string(search_diffs) + " search mismatches; training metrics " +
              (metrics_same ? "identical" : "differ") + ", parameters " +
              (params_same ? "identical" : "differ")};
}

// 12. Every CLI command is byte-reproducible.
Verdict CliDeterminism() {
  const auto root = std::filesystem::temp_directory_path() /
                    ("teamzero_acceptance_" + std::to_string(::getpid()));
  const auto results =
      testutil::CheckDeterminism(root, std::string(TEAMZERO_CONFIG_DIR) + "/smoke_team.cfg");
  std::filesystem::remove_all(root);
  int differ = 0;
  std::string first;
  for (const auto& [file, same] : results) {
    if (!same) {
      ++differ;
      if (first.empty()) first = " (first: " + file + ")";
    }
  }
  return {differ == 0 && results.size() >= 15,
          std::to_string(results.size() - differ) + "/" + std::to_string(results.size()) +
              " outputs identical across reruns" + first};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace teamzero

int main(int argc, char** argv) {
  using namespace teamzero;
  const std::vector<Criterion> criteria = {
      {1, "elo-table", EloTable},
      {2, "gradient-identity", GradientIdentity},
      {3, "intrinsic-equilibrium", Equilibrium},
      {4, "search-vs-oracle", SearchVsOracle},
      {5, "nash-solver", NashSolver},
      {6, "interaction-graphs", GraphFixtures},
      {7, "selection-algebra", SelectionAlgebra},
      {8, "mlp-gradients", MlpGradients},
      {9, "vanilla-reduction", VanillaReduction},
      {10, "team-puzzle-analog", experiments::TeamPuzzleAnalog},
      {11, "puzzle-start-analog", experiments::PuzzleStartAnalog},
      {12, "cli-determinism", CliDeterminism},
  };
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !v.pass;
    std::printf("%s [%2d] %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
