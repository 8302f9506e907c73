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

#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <set>

#include "teamzero/encoding.hpp"
#include "teamzero/evaluator.hpp"
#include "teamzero/minimax.hpp"
#include "teamzero/reference_search.hpp"
#include "teamzero/search.hpp"

namespace teamzero {
namespace {

const GameSpec& Ttt() { return GameSpec::Get(GameKind::kTicTacToe); }
const GameSpec& C4() { return GameSpec::Get(GameKind::kConnectFour); }

GameState Play(const GameSpec& spec, std::initializer_list<MoveId> moves) {
  GameState s = GameState::Initial(spec);
  for (MoveId m : moves) s = s.ApplyMove(m);
  return s;
}

// Uniform prior, constant values; records every latent it is queried with.
class StubEvaluator : public Evaluator {
 public:
  StubEvaluator(double v, double v_d, int n_players = 1)
      : v_(v), v_d_(v_d), n_players_(n_players) {}
  EvalOutput Evaluate(const GameState& state, int latent) const override {
    {
      std::lock_guard<std::mutex> lock(mu_);
      latents_.insert(latent);
    }
    EvalOutput out;
    out.p.assign(state.spec().num_moves(), 0.0);
    const auto legal = state.LegalMoves();
    for (MoveId m : legal) out.p[m] = 1.0 / legal.size();
    out.v = v_;
    out.v_d = v_d_;
    return out;
  }
  int n_players() const override { return n_players_; }
  std::set<int> latents() const { return latents_; }

 private:
  double v_, v_d_;
  int n_players_;
  mutable std::mutex mu_;
  mutable std::set<int> latents_;
};

TEST(ExplorationRate, Formula) {
  SearchConfig c;
  EXPECT_NEAR(ExplorationRate(0, c), std::log(19653.0 / 19652.0) + 1.25, 1e-15);
  EXPECT_NEAR(ExplorationRate(0, c), 1.25005, 1e-5);
  EXPECT_NEAR(ExplorationRate(19652, c), 1.9431, 1e-4);
  c.c_init = 0.0;
  EXPECT_NEAR(ExplorationRate(0, c), 0.00005, 1e-6);
}

TEST(PuctSelect, HandEvaluation) {
  const std::vector<NodeStats> kids{{1, 0.5, 0.5, 0.5}, {0, 0.0, 0.0, 0.5}};
  const auto scores = PuctScores(kids, 1, 1.25);
  EXPECT_DOUBLE_EQ(scores[0], 0.8125);
  EXPECT_DOUBLE_EQ(scores[1], 0.625);
  Rng rng(1);
  EXPECT_EQ(PuctSelectWithRate(kids, 1, 1.25, rng), 0u);
}

TEST(PuctSelect, SingleMove) {
  Rng rng(1);
  const std::vector<NodeStats> kids{{3, 1.0, 0.3, 1.0}};
  EXPECT_EQ(PuctSelect(kids, 3, SearchConfig{}, rng), 0u);
}

TEST(PuctSelect, TiesUniform) {
  Rng rng(7);
  const std::vector<NodeStats> kids(4, NodeStats{0, 0.0, 0.0, 0.25});
  std::vector<int> freq(4, 0);
  const int n = 10000;
  for (int k = 0; k < n; ++k) ++freq[PuctSelect(kids, 0, SearchConfig{}, rng)];
  const double sigma = std::sqrt(n * 0.25 * 0.75);
  for (int f : freq) EXPECT_NEAR(f, n * 0.25, 3 * sigma);
}

TEST(Backup, Accumulates) {
  NodeStats edge{0, 0.0, 0.0, 0.5};
  std::vector<NodeStats*> path{&edge};
  Backup(path, 1.0);
  EXPECT_EQ(edge.n, 1);
  EXPECT_EQ(edge.w, 1.0);
  EXPECT_EQ(edge.q, 1.0);
  Backup(path, 0.0);
  EXPECT_EQ(edge.n, 2);
  EXPECT_EQ(edge.w, 1.0);
  EXPECT_EQ(edge.q, 0.5);
}

TEST(Backup, AlternatesSign) {
  NodeStats a, b, c;
  std::vector<NodeStats*> path{&a, &b, &c};
  Backup(path, 0.4);
  EXPECT_EQ(c.w, 0.4);
  EXPECT_EQ(b.w, -0.4);
  EXPECT_EQ(a.w, 0.4);
}

TEST(SelectAction, Examples) {
  Rng rng(3);
  const std::vector<double> dominant{100, 0, 0};
  for (int k = 0; k < 100; ++k) EXPECT_EQ(SelectFromCounts(dominant, 0, 6, rng), 0u);
  const std::vector<double> even{50, 50};
  int first = 0;
  const int n = 10000;
  for (int k = 0; k < n; ++k) first += SelectFromCounts(even, 0, 6, rng) == 0;
  EXPECT_NEAR(first, n / 2, 3 * std::sqrt(n * 0.25));
  const std::vector<double> close{10, 9};
  for (int k = 0; k < 100; ++k) EXPECT_EQ(SelectFromCounts(close, 6, 6, rng), 0u);
}

TEST(SelectAction, TemperatureTen) {
  Rng rng(3);
  const std::vector<double> counts{90, 10};
  int second = 0;
  for (int k = 0; k < 10000; ++k) second += SelectWithTemperature(counts, 10.0, rng) == 1;
  // p(second) = 10^0.1 / (90^0.1 + 10^0.1)
  const double p = std::pow(10.0, 0.1) / (std::pow(90.0, 0.1) + std::pow(10.0, 0.1));
  EXPECT_NEAR(second, 10000 * p, 3 * std::sqrt(10000 * p * (1 - p)));
}

TEST(RunSearch, VisitCountsSumToSimulations) {
  StubEvaluator eval(0.0, 0.0);
  SearchConfig cfg;
  cfg.n_simulations = 137;
  Rng rng(1);
  const auto r = RunSearch(GameState::Initial(Ttt()), 0, eval, nullptr, cfg, rng);
  EXPECT_EQ(r.total_visits, 137);
  int sum = 0;
  double pi_sum = 0.0;
  for (const auto& m : r.moves) sum += m.n;
  for (double p : r.pi) pi_sum += p;
  EXPECT_EQ(sum, 137);
  EXPECT_NEAR(pi_sum, 1.0, 1e-12);
}

TEST(RunSearch, TerminalRootThrows) {
  StubEvaluator eval(0.0, 0.0);
  Rng rng(1);
  EXPECT_THROW(RunSearch(Play(Ttt(), {0, 3, 1, 4, 2}), 0, eval, nullptr,
                         SearchConfig{}, rng),
               SearchError);
  SearchConfig bad;
  bad.n_simulations = 0;
  EXPECT_THROW(Searcher(eval, nullptr, bad), SearchError);
}

TEST(RunSearch, FindsImmediateWin) {
  StubEvaluator eval(0.0, 0.0);
  SearchConfig cfg;
  cfg.n_simulations = 10000;
  Rng rng(5);
  const auto s = Play(Ttt(), {0, 3, 1, 4});  // X to move wins at 2
  const auto r = RunSearch(s, 0, eval, nullptr, cfg, rng);
  EXPECT_EQ(SelectGreedy(r, rng), 2);
}

TEST(RunSearch, TreeAuditHolds) {
  StubEvaluator eval(0.1, 0.2, 2);
  TeamState team = TeamState::Make(2, C4().feature_dim(), 0.5, 1.0, 0.9);
  team.psi[1][0] = 0.4;
  team.psi[1][25] = 0.3;
  SearchConfig cfg;
  cfg.n_simulations = 300;
  cfg.diversity = true;
  cfg.lambda = 0.5;
  Rng rng(2);
  Searcher searcher(eval, &team, cfg);
  searcher.Run(Play(C4(), {2}), 1, rng);
  const auto [worst, bad] = searcher.Audit();
  EXPECT_LE(worst, 1e-12);
  EXPECT_EQ(bad, 0);
}

TEST(RunSearch, VanillaMatchesReferenceBitwise) {
  MlpModel model(C4(), 1, {32, 32}, 17);
  for (const auto& s : {GameState::Initial(C4()), Play(C4(), {2, 2, 1}),
                        Play(Ttt(), {}), Play(Ttt(), {4, 0})}) {
    const Model* m = &model;
    MlpModel ttt_model(Ttt(), 1, {32, 32}, 17);
    if (&s.spec() == &Ttt()) m = &ttt_model;
    SearchConfig cfg;
    cfg.n_simulations = 400;
    TeamState team = TeamState::Make(1, s.spec().feature_dim(), 0.7, 1.0, 0.99);
    cfg.diversity = false;
    Rng a(99), b(99);
    const auto mine = RunSearch(s, 0, *m, &team, cfg, a);
    reference::VanillaMcts ref(*m, cfg.n_simulations, cfg.c_base, cfg.c_init);
    const auto theirs = ref.Run(s, 0, b);
    ASSERT_EQ(mine.moves.size(), theirs.moves.size());
    for (std::size_t k = 0; k < mine.moves.size(); ++k) {
      EXPECT_EQ(mine.moves[k].n, theirs.moves[k].n);
      EXPECT_EQ(mine.moves[k].q, theirs.moves[k].q);
      EXPECT_EQ(mine.moves[k].u, theirs.moves[k].u);
    }
    EXPECT_EQ(mine.pi, theirs.pi);
    EXPECT_EQ(mine.root_value, theirs.root_value);
    EXPECT_EQ(a.Uniform(), b.Uniform());
  }
}

TEST(RunSearch, DiversityMixingAndOpponentZeroing) {
  const double v = 0.3, v_d = 0.8, lambda = 0.6;
  StubEvaluator eval(v, v_d, 2);
  TeamState team = TeamState::Make(2, Ttt().feature_dim(), lambda, 1.5, 0.9);
  for (int k = 0; k < 18; ++k) team.psi[1][k] = 0.05 * (k % 5);
  SearchConfig cfg;
  cfg.n_simulations = 200;
  cfg.diversity = true;
  cfg.lambda = lambda;
  const auto root = Play(Ttt(), {4});  // O to move; latent 1 searches
  Searcher searcher(eval, &team, cfg);
  int checked_odd = 0, checked_even = 0;
  searcher.set_trace([&](const SimulationTrace& t) {
    // Expected intrinsic sum: rewards on the searching player's edges only.
    GameState s = root;
    double intrinsic = 0.0;
    for (std::size_t k = 0; k < t.path.size(); ++k) {
      if (k % 2 == 0) {
        intrinsic += IntrinsicReward(FeatureMap(s, t.path[k]), team.psi[1],
                                     team.psi[0], team.l0);
      }
      s = s.ApplyMove(t.path[k]);
    }
    EXPECT_NEAR(t.intrinsic_sum, intrinsic, 1e-12) << FormatTrace(t);
    double value, vd;
    if (auto o = s.TerminalOutcome()) {
      value = o->For(s.to_move());
      vd = 0.0;
    } else {
      value = v;
      vd = v_d;
    }
    const bool own = t.path.size() % 2 == 0;
    const double expected = own ? lambda * value + (1 - lambda) * (intrinsic + vd)
                                : lambda * -value + (1 - lambda) * intrinsic;
    EXPECT_NEAR(t.leaf_value, expected, 1e-12) << FormatTrace(t);
    (own ? checked_even : checked_odd)++;
  });
  Rng rng(4);
  searcher.Run(root, 1, rng);
  EXPECT_GT(checked_odd, 0);
  EXPECT_GT(checked_even, 0);
  EXPECT_EQ(eval.latents(), std::set<int>{1});
}

TEST(RunSearch, InformationHiding) {
  for (int latent = 0; latent < 3; ++latent) {
    StubEvaluator eval(0.0, 0.0, 3);
    TeamState team = TeamState::Make(3, C4().feature_dim(), 0.7, 1.0, 0.99);
    team.psi[2][3] = 1.0;
    SearchConfig cfg;
    cfg.n_simulations = 100;
    cfg.diversity = true;
    cfg.lambda = team.lambda[latent];
    Rng rng(latent);
    RunSearch(Play(C4(), {0}), latent, eval, &team, cfg, rng);
    EXPECT_EQ(eval.latents(), std::set<int>{latent});
  }
}

TEST(RunSearch, DeterministicGivenSeed) {
  MlpModel model(C4(), 2, {16, 16}, 3);
  TeamState team = TeamState::Make(2, C4().feature_dim(), 0.7, 1.0, 0.99);
  team.psi[1][7] = 0.5;
  SearchConfig cfg;
  cfg.n_simulations = 200;
  cfg.diversity = true;
  cfg.lambda = 0.7;
  Rng a(8), b(8);
  const auto x = RunSearch(GameState::Initial(C4()), 1, model, &team, cfg, a);
  const auto y = RunSearch(GameState::Initial(C4()), 1, model, &team, cfg, b);
  EXPECT_EQ(x.pi, y.pi);
  EXPECT_EQ(x.root_value, y.root_value);
}

TEST(RunSearch, RootNoiseChangesPriorsOnlyWhenEnabled) {
  StubEvaluator eval(0.0, 0.0);
  SearchConfig cfg;
  cfg.n_simulations = 50;
  cfg.root_noise = true;
  Rng rng(1);
  const auto r = RunSearch(GameState::Initial(Ttt()), 0, eval, nullptr, cfg, rng);
  double sum = 0.0;
  bool differs = false;
  for (const auto& m : r.moves) {
    sum += m.p;
    differs |= std::abs(m.p - 1.0 / 9.0) > 1e-9;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_TRUE(differs);
}

TEST(RunSearch, ForcedWinsWithinTwoPliesSampled) {
  // Smaller-budget version of the full acceptance check.
  MinimaxSolver solver;
  StubEvaluator eval(0.0, 0.0);
  SearchConfig cfg;
  cfg.n_simulations = 2000;
  int total = 0, agree = 0;
  Rng rng(12);
  for (const auto& s : ReachableStates(Ttt())) {
    if (s.IsTerminal()) continue;
    bool immediate = false;
    for (MoveId m : s.LegalMoves()) {
      auto o = s.ApplyMove(m).TerminalOutcome();
      if (o && o->z != 0) immediate = true;
    }
    if (!immediate || ++total % 7 != 0) continue;
    const auto sol = solver.Solve(s);
    const auto r = RunSearch(s, 0, eval, nullptr, cfg, rng);
    const MoveId pick = SelectGreedy(r, rng);
    agree += std::count(sol.optimal_moves.begin(), sol.optimal_moves.end(), pick);
  }
  EXPECT_GE(agree, static_cast<int>(0.99 * (total / 7)));
}

}  // namespace
}  // namespace teamzero
