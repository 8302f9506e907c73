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

// Latent-conditioned policy / value / intrinsic-value function.
//
// Two interchangeable backends sit behind the Model interface:
//   * TabularModel keeps one entry per (position, latent) and is exact on
//     tic-tac-toe.
//   * MlpModel is a fully connected tanh torso over the flattened input
//     planes with three heads: softmax policy, tanh value, linear intrinsic
//     value.
//
// Both are trained on
//   (z - v)^2 + w_d (z_d - v_d)^2 - pi . log p  (+ l2 |theta|^2)
// averaged over the batch, with SGD + momentum.
//
// Checkpoint format (text, one token group per line):
//   teamzero-model 1
//   backend mlp|tabular
//   game <id>
//   history <H>
//   n_players <N>
//   layers <in> <h1> ... <hk>          (mlp only)
//   params <count>                      (mlp) followed by <count> hexfloats
//   velocity <count>                    (mlp) followed by <count> hexfloats
//   entries <count>                     (tabular) followed by lines
//     <board-key> <latent> <logit_0..logit_{M-1}> <v_raw> <v_d>
//   end
// Hexfloats make the round trip bit-exact.

#ifndef TEAMZERO_EVALUATOR_HPP_
#define TEAMZERO_EVALUATOR_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "teamzero/encoding.hpp"
#include "teamzero/game.hpp"
#include "teamzero/random.hpp"

namespace teamzero {

struct EvalOutput {
  std::vector<double> p;  // over all MoveIds; zero on illegal moves
  double v = 0.0;         // for the player to move, in [-1, 1]
  double v_d = 0.0;       // intrinsic value, unbounded
};

struct TrainTarget {
  std::vector<double> pi;  // over all MoveIds
  double z = 0.0;          // outcome from the mover's perspective
  double z_d = 0.0;
  int latent = 0;
};

struct TrainSample {
  GameState state;
  TrainTarget target;
};

struct LossOptions {
  double l2 = 1e-4;
  double intrinsic_weight = 1.0;
};

struct UpdateOptions {
  double learning_rate = 1e-2;
  double momentum = 0.9;
  LossOptions loss;
  // Probability of zeroing each history plane of the MLP input (no-op when
  // the game has no history planes).
  double history_dropout = 0.0;
};

struct LossBreakdown {
  double total = 0.0;
  double value = 0.0;
  double intrinsic = 0.0;
  double policy = 0.0;
  double l2 = 0.0;
};

enum class Backend { kTabular, kMlp };

inline std::string BackendName(Backend b) {
  return b == Backend::kMlp ? "mlp" : "tabular";
}

inline Backend ParseBackend(const std::string& s) {
  if (s == "mlp") return Backend::kMlp;
  if (s == "tabular") return Backend::kTabular;
  throw ParseError("unknown backend '" + s + "'");
}

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kLogFloor = 1e-12;

// Read-only evaluation interface used by search. Implementations must be
// safe to call concurrently.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvalOutput Evaluate(const GameState& state, int latent) const = 0;
  virtual int n_players() const = 0;
};

// Softmax restricted to legal moves; illegal entries are exactly zero.
inline std::vector<double> MaskedSoftmax(std::span<const double> logits,
                                         const GameState& state) {
  std::vector<double> p(logits.size(), 0.0);
  const auto legal = state.LegalMoves();
  if (legal.empty()) return p;
  double max_logit = -std::numeric_limits<double>::infinity();
  for (MoveId m : legal) max_logit = std::max(max_logit, logits[m]);
  double total = 0.0;
  for (MoveId m : legal) {
    p[m] = std::exp(logits[m] - max_logit);
    total += p[m];
  }
  for (MoveId m : legal) p[m] /= total;
  return p;
}

inline double SampleLoss(const EvalOutput& out, const TrainTarget& target,
                         const LossOptions& opts, LossBreakdown* acc) {
  const double ev = (target.z - out.v) * (target.z - out.v);
  const double ed = (target.z_d - out.v_d) * (target.z_d - out.v_d);
  double ce = 0.0;
  for (std::size_t a = 0; a < target.pi.size(); ++a) {
    if (target.pi[a] > 0.0) {
      ce -= target.pi[a] * std::log(std::max(out.p[a], kLogFloor));
    }
  }
  acc->value += ev;
  acc->intrinsic += ed;
  acc->policy += ce;
  return ev + opts.intrinsic_weight * ed + ce;
}

class Model : public Evaluator {
 public:
  virtual Backend backend() const = 0;
  virtual const GameSpec& game() const = 0;

  // Mean loss over the batch (plus the L2 term). Throws on an empty batch.
  virtual LossBreakdown Loss(std::span<const TrainSample> batch,
                             const LossOptions& opts) const = 0;

  // One SGD-with-momentum step. Returns the loss before the step. Throws
  // NumericalError, leaving the parameters untouched, when any gradient
  // entry is non-finite.
  virtual LossBreakdown Update(std::span<const TrainSample> batch,
                               const UpdateOptions& opts, Rng* rng) = 0;

  virtual std::unique_ptr<Model> Clone() const = 0;
  virtual void Save(std::ostream& out) const = 0;

  static std::unique_ptr<Model> Load(std::istream& in);
};

namespace internal {

inline void WriteHex(std::ostream& out, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", x);
  out << buf;
}

inline double ReadHex(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw ParseError("truncated checkpoint");
  char* end = nullptr;
  const double x = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError("bad number '" + tok + "' in checkpoint");
  }
  return x;
}

inline void Expect(std::istream& in, const std::string& word) {
  std::string tok;
  if (!(in >> tok) || tok != word) {
    throw ParseError("checkpoint: expected '" + word + "', got '" + tok +
                     "'");
  }
}

template <typename T>
T ReadValue(std::istream& in, const std::string& what) {
  T x;
  if (!(in >> x)) throw ParseError("checkpoint: bad " + what);
  return x;
}

}  // namespace internal

// -- Tabular backend --------------------------------------------------------

class TabularModel final : public Model {
 public:
  struct Entry {
    std::vector<double> logits;
    double v_raw = 0.0;
    double v_d = 0.0;
    std::vector<double> velocity;  // logits..., v_raw, v_d
  };
  using Key = std::pair<std::uint64_t, int>;

  TabularModel(const GameSpec& game, int n_players)
      : game_(&game), n_players_(n_players) {
    if (n_players < 1) throw std::invalid_argument("n_players must be >= 1");
  }

  Backend backend() const override { return Backend::kTabular; }
  const GameSpec& game() const override { return *game_; }
  int n_players() const override { return n_players_; }
  std::size_t num_entries() const { return table_.size(); }

  EvalOutput Evaluate(const GameState& state, int latent) const override {
    CheckLatent(latent);
    EvalOutput out;
    auto it = table_.find(KeyOf(state, latent));
    if (it == table_.end()) {
      const std::vector<double> zeros(game_->num_moves(), 0.0);
      out.p = MaskedSoftmax(zeros, state);
      return out;
    }
    out.p = MaskedSoftmax(it->second.logits, state);
    out.v = std::tanh(it->second.v_raw);
    out.v_d = it->second.v_d;
    return out;
  }

  LossBreakdown Loss(std::span<const TrainSample> batch,
                     const LossOptions& opts) const override {
    if (batch.empty()) throw std::invalid_argument("loss of empty batch");
    LossBreakdown acc;
    for (const auto& s : batch) {
      acc.total += SampleLoss(Evaluate(s.state, s.target.latent), s.target,
                              opts, &acc);
    }
    const double n = static_cast<double>(batch.size());
    acc.total /= n;
    acc.value /= n;
    acc.intrinsic /= n;
    acc.policy /= n;
    // L2 over the entries the batch touches.
    std::map<Key, bool> touched;
    for (const auto& s : batch) touched[KeyOf(s.state, s.target.latent)] = true;
    for (const auto& [key, unused] : touched) {
      auto it = table_.find(key);
      if (it == table_.end()) continue;
      acc.l2 += SquaredNorm(it->second);
    }
    acc.l2 *= opts.l2;
    acc.total += acc.l2;
    return acc;
  }

  LossBreakdown Update(std::span<const TrainSample> batch,
                       const UpdateOptions& opts, Rng*) override {
    const LossBreakdown before = Loss(batch, opts.loss);
    const double n = static_cast<double>(batch.size());
    const int moves = game_->num_moves();
    std::map<Key, std::vector<double>> grads;
    for (const auto& s : batch) {
      const Key key = KeyOf(s.state, s.target.latent);
      auto& g = grads[key];
      if (g.empty()) g.assign(moves + 2, 0.0);
      const EvalOutput out = Evaluate(s.state, s.target.latent);
      for (MoveId m : s.state.LegalMoves()) {
        g[m] += (out.p[m] - s.target.pi[m]) / n;
      }
      g[moves] += 2.0 * (out.v - s.target.z) * (1.0 - out.v * out.v) / n;
      g[moves + 1] +=
          2.0 * opts.loss.intrinsic_weight * (out.v_d - s.target.z_d) / n;
    }
    for (auto& [key, g] : grads) {
      auto it = table_.find(key);
      const Entry* e = it == table_.end() ? nullptr : &it->second;
      for (int k = 0; k < moves + 2; ++k) {
        const double theta = e ? ParamAt(*e, k) : 0.0;
        g[k] += 2.0 * opts.loss.l2 * theta;
        if (!std::isfinite(g[k])) {
          throw NumericalError("non-finite tabular gradient at latent " +
                               std::to_string(key.second));
        }
      }
    }
    for (auto& [key, g] : grads) {
      Entry& e = FindOrInsert(key);
      for (int k = 0; k < moves + 2; ++k) {
        e.velocity[k] = opts.momentum * e.velocity[k] + g[k];
        ParamAt(e, k) -= opts.learning_rate * e.velocity[k];
      }
    }
    return before;
  }

  std::unique_ptr<Model> Clone() const override {
    return std::make_unique<TabularModel>(*this);
  }

  void Save(std::ostream& out) const override {
    out << "teamzero-model 1\nbackend tabular\ngame " << game_->id
        << "\nhistory " << game_->history_length << "\nn_players "
        << n_players_ << "\nentries " << table_.size() << "\n";
    for (const auto& [key, e] : table_) {
      out << key.first << ' ' << key.second;
      for (double x : e.logits) {
        out << ' ';
        internal::WriteHex(out, x);
      }
      out << ' ';
      internal::WriteHex(out, e.v_raw);
      out << ' ';
      internal::WriteHex(out, e.v_d);
      out << '\n';
    }
    out << "end\n";
  }

  static std::unique_ptr<TabularModel> LoadBody(std::istream& in,
                                                const GameSpec& game,
                                                int n_players) {
    auto model = std::make_unique<TabularModel>(game, n_players);
    internal::Expect(in, "entries");
    const auto count = internal::ReadValue<std::size_t>(in, "entry count");
    for (std::size_t i = 0; i < count; ++i) {
      Key key;
      key.first = internal::ReadValue<std::uint64_t>(in, "entry key");
      key.second = internal::ReadValue<int>(in, "entry latent");
      Entry& e = model->FindOrInsert(key);
      for (auto& x : e.logits) x = internal::ReadHex(in);
      e.v_raw = internal::ReadHex(in);
      e.v_d = internal::ReadHex(in);
    }
    internal::Expect(in, "end");
    return model;
  }

 private:
  void CheckLatent(int latent) const {
    if (latent < 0 || latent >= n_players_) {
      throw std::out_of_range("latent out of range");
    }
  }

  Key KeyOf(const GameState& state, int latent) const {
    CheckLatent(latent);
    return {state.BoardKey(), latent};
  }

  Entry& FindOrInsert(const Key& key) {
    auto [it, inserted] = table_.try_emplace(key);
    if (inserted) {
      it->second.logits.assign(game_->num_moves(), 0.0);
      it->second.velocity.assign(game_->num_moves() + 2, 0.0);
    }
    return it->second;
  }

  double& ParamAt(Entry& e, int k) const {
    const int moves = game_->num_moves();
    if (k < moves) return e.logits[k];
    return k == moves ? e.v_raw : e.v_d;
  }
  double ParamAt(const Entry& e, int k) const {
    return ParamAt(const_cast<Entry&>(e), k);
  }

  static double SquaredNorm(const Entry& e) {
    double s = e.v_raw * e.v_raw + e.v_d * e.v_d;
    for (double x : e.logits) s += x * x;
    return s;
  }

  const GameSpec* game_;
  int n_players_;
  std::map<Key, Entry> table_;
};

// -- MLP backend ------------------------------------------------------------

class MlpModel final : public Model {
 public:
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using MatrixMap = Eigen::Map<Matrix>;
  using ConstMatrixMap = Eigen::Map<const Matrix>;
  using VectorMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

  // `hidden` lists the torso widths; default {64, 64}.
  MlpModel(const GameSpec& game, int n_players, std::vector<int> hidden,
           std::uint64_t seed)
      : game_(&game), n_players_(n_players), hidden_(std::move(hidden)) {
    if (n_players < 1) throw std::invalid_argument("n_players must be >= 1");
    if (hidden_.empty()) throw std::invalid_argument("need >= 1 hidden layer");
    BuildLayout();
    Rng rng(seed);
    for (const auto& layer : layers_) {
      const double a = std::sqrt(6.0 / (layer.in + layer.out));
      for (int k = 0; k < layer.in * layer.out; ++k) {
        params_[layer.w_offset + k] = (2.0 * rng.Uniform() - 1.0) * a;
      }
    }
  }

  Backend backend() const override { return Backend::kMlp; }
  const GameSpec& game() const override { return *game_; }
  int n_players() const override { return n_players_; }
  const std::vector<int>& hidden() const { return hidden_; }
  int input_dim() const { return game_->num_planes(n_players_) * game_->num_cells(); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  EvalOutput Evaluate(const GameState& state, int latent) const override {
    const PlaneStack planes = EncodePlanes(state, latent, n_players_);
    Matrix x = ConstMatrixMap(planes.values.data(), 1, input_dim());
    Forward fwd = RunForward(x);
    EvalOutput out;
    out.p = MaskedSoftmax(
        std::span<const double>(fwd.logits.data(), game_->num_moves()), state);
    out.v = fwd.v(0);
    out.v_d = fwd.v_d(0);
    return out;
  }

  LossBreakdown Loss(std::span<const TrainSample> batch,
                     const LossOptions& opts) const override {
    if (batch.empty()) throw std::invalid_argument("loss of empty batch");
    Matrix x = EncodeBatch(batch, 0.0, nullptr);
    return LossAndGradient(batch, x, opts, nullptr);
  }

  LossBreakdown Update(std::span<const TrainSample> batch,
                       const UpdateOptions& opts, Rng* rng) override {
    if (batch.empty()) throw std::invalid_argument("update on empty batch");
    Matrix x = EncodeBatch(batch, opts.history_dropout, rng);
    std::vector<double> grad(params_.size(), 0.0);
    const LossBreakdown before = LossAndGradient(batch, x, opts.loss, &grad);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      if (!std::isfinite(grad[k])) {
        throw NumericalError("non-finite MLP gradient at parameter " +
                             std::to_string(k) + " (loss " +
                             std::to_string(before.total) + ")");
      }
    }
    if (velocity_.size() != params_.size()) {
      velocity_.assign(params_.size(), 0.0);
    }
    for (std::size_t k = 0; k < grad.size(); ++k) {
      velocity_[k] = opts.momentum * velocity_[k] + grad[k];
      params_[k] -= opts.learning_rate * velocity_[k];
    }
    return before;
  }

  // Loss gradient with respect to params(), for a batch without dropout.
  std::vector<double> Gradient(std::span<const TrainSample> batch,
                               const LossOptions& opts) const {
    Matrix x = EncodeBatch(batch, 0.0, nullptr);
    std::vector<double> grad(params_.size(), 0.0);
    LossAndGradient(batch, x, opts, &grad);
    return grad;
  }

  std::unique_ptr<Model> Clone() const override {
    return std::make_unique<MlpModel>(*this);
  }

  void Save(std::ostream& out) const override {
    out << "teamzero-model 1\nbackend mlp\ngame " << game_->id
        << "\nhistory " << game_->history_length << "\nn_players "
        << n_players_ << "\nlayers " << input_dim();
    for (int h : hidden_) out << ' ' << h;
    out << "\nparams " << params_.size() << "\n";
    for (double x : params_) {
      internal::WriteHex(out, x);
      out << '\n';
    }
    out << "velocity " << velocity_.size() << "\n";
    for (double x : velocity_) {
      internal::WriteHex(out, x);
      out << '\n';
    }
    out << "end\n";
  }

  static std::unique_ptr<MlpModel> LoadBody(std::istream& in,
                                            const GameSpec& game,
                                            int n_players) {
    internal::Expect(in, "layers");
    std::string line;
    std::getline(in, line);
    std::istringstream ls(line);
    int in_dim = 0;
    ls >> in_dim;
    std::vector<int> hidden;
    for (int h; ls >> h;) hidden.push_back(h);
    auto model = std::make_unique<MlpModel>(game, n_players, hidden, 0);
    if (in_dim != model->input_dim()) {
      throw ParseError("checkpoint input dimension mismatch");
    }
    internal::Expect(in, "params");
    const auto count = internal::ReadValue<std::size_t>(in, "param count");
    if (count != model->params_.size()) {
      throw ParseError("checkpoint parameter count mismatch");
    }
    for (auto& x : model->params_) x = internal::ReadHex(in);
    internal::Expect(in, "velocity");
    const auto vcount = internal::ReadValue<std::size_t>(in, "velocity count");
    if (vcount != 0 && vcount != count) {
      throw ParseError("checkpoint velocity count mismatch");
    }
    model->velocity_.resize(vcount);
    for (auto& x : model->velocity_) x = internal::ReadHex(in);
    internal::Expect(in, "end");
    return model;
  }

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    std::size_t w_offset = 0;  // out x in, row-major
    std::size_t b_offset = 0;
  };

  struct Forward {
    std::vector<Matrix> activations;  // [0] = input, then each hidden layer
    Matrix logits;
    Eigen::VectorXd v;
    Eigen::VectorXd v_d;
  };

  // Torso layers, then heads: policy, value, intrinsic value.
  void BuildLayout() {
    std::size_t offset = 0;
    auto add = [&](int in, int out) {
      Layer l{in, out, offset, offset + static_cast<std::size_t>(in) * out};
      offset = l.b_offset + out;
      layers_.push_back(l);
    };
    int prev = input_dim();
    for (int h : hidden_) {
      add(prev, h);
      prev = h;
    }
    add(prev, game_->num_moves());
    add(prev, 1);
    add(prev, 1);
    params_.assign(offset, 0.0);
  }

  std::size_t num_torso() const { return hidden_.size(); }

  ConstMatrixMap W(const Layer& l) const {
    return ConstMatrixMap(params_.data() + l.w_offset, l.out, l.in);
  }
  Eigen::Map<const Eigen::RowVectorXd> B(const Layer& l) const {
    return Eigen::Map<const Eigen::RowVectorXd>(params_.data() + l.b_offset,
                                                l.out);
  }

  Matrix EncodeBatch(std::span<const TrainSample> batch, double dropout,
                     Rng* rng) const {
    Matrix x(static_cast<Eigen::Index>(batch.size()), input_dim());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      PlaneStack planes =
          EncodePlanes(batch[i].state, batch[i].target.latent, n_players_);
      if (dropout > 0.0 && rng != nullptr) {
        ApplyHistoryDropout(planes, dropout, *rng);
      }
      x.row(static_cast<Eigen::Index>(i)) =
          ConstMatrixMap(planes.values.data(), 1, input_dim());
    }
    return x;
  }

  Forward RunForward(const Matrix& x) const {
    Forward f;
    f.activations.push_back(x);
    for (std::size_t k = 0; k < num_torso(); ++k) {
      const Layer& l = layers_[k];
      Matrix a = f.activations.back() * W(l).transpose();
      a.rowwise() += B(l);
      f.activations.push_back(a.array().tanh().matrix());
    }
    const Matrix& h = f.activations.back();
    const Layer& lp = layers_[num_torso()];
    const Layer& lv = layers_[num_torso() + 1];
    const Layer& ld = layers_[num_torso() + 2];
    f.logits = h * W(lp).transpose();
    f.logits.rowwise() += B(lp);
    Matrix av = h * W(lv).transpose();
    av.rowwise() += B(lv);
    f.v = av.col(0).array().tanh().matrix();
    Matrix ad = h * W(ld).transpose();
    ad.rowwise() += B(ld);
    f.v_d = ad.col(0);
    return f;
  }

  LossBreakdown LossAndGradient(std::span<const TrainSample> batch,
                                const Matrix& x, const LossOptions& opts,
                                std::vector<double>* grad) const {
    const Forward f = RunForward(x);
    const auto n = static_cast<Eigen::Index>(batch.size());
    const int moves = game_->num_moves();
    LossBreakdown acc;
    Matrix d_logits = Matrix::Zero(n, moves);
    Matrix d_av(n, 1), d_ad(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const TrainSample& s = batch[static_cast<std::size_t>(i)];
      EvalOutput out;
      out.p = MaskedSoftmax(
          std::span<const double>(f.logits.row(i).data(), moves), s.state);
      out.v = f.v(i);
      out.v_d = f.v_d(i);
      acc.total += SampleLoss(out, s.target, opts, &acc);
      for (MoveId m : s.state.LegalMoves()) {
        d_logits(i, m) = (out.p[m] - s.target.pi[m]) / n;
      }
      d_av(i, 0) = 2.0 * (out.v - s.target.z) * (1.0 - out.v * out.v) / n;
      d_ad(i, 0) = 2.0 * opts.intrinsic_weight * (out.v_d - s.target.z_d) / n;
    }
    acc.total /= n;
    acc.value /= n;
    acc.intrinsic /= n;
    acc.policy /= n;
    double sq = 0.0;
    for (double p : params_) sq += p * p;
    acc.l2 = opts.l2 * sq;
    acc.total += acc.l2;
    if (grad == nullptr) return acc;

    auto accumulate = [&](const Layer& l, const Matrix& d_out,
                          const Matrix& input) {
      MatrixMap gw(grad->data() + l.w_offset, l.out, l.in);
      gw += d_out.transpose() * input;
      Eigen::Map<Eigen::RowVectorXd> gb(grad->data() + l.b_offset, l.out);
      gb += d_out.colwise().sum();
    };
    const Matrix& h = f.activations.back();
    const Layer& lp = layers_[num_torso()];
    const Layer& lv = layers_[num_torso() + 1];
    const Layer& ld = layers_[num_torso() + 2];
    accumulate(lp, d_logits, h);
    accumulate(lv, d_av, h);
    accumulate(ld, d_ad, h);
    Matrix d_h = d_logits * W(lp) + d_av * W(lv) + d_ad * W(ld);
    for (std::size_t k = num_torso(); k-- > 0;) {
      const Matrix& out = f.activations[k + 1];
      Matrix d_a =
          (d_h.array() * (1.0 - out.array().square())).matrix();
      accumulate(layers_[k], d_a, f.activations[k]);
      if (k > 0) d_h = d_a * W(layers_[k]);
    }
    for (std::size_t k = 0; k < params_.size(); ++k) {
      (*grad)[k] += 2.0 * opts.l2 * params_[k];
    }
    return acc;
  }

  const GameSpec* game_;
  int n_players_;
  std::vector<int> hidden_;
  std::vector<Layer> layers_;
  std::vector<double> params_;
  std::vector<double> velocity_;
};

inline std::unique_ptr<Model> Model::Load(std::istream& in) {
  internal::Expect(in, "teamzero-model");
  if (internal::ReadValue<int>(in, "version") != 1) {
    throw ParseError("unsupported model checkpoint version");
  }
  internal::Expect(in, "backend");
  const Backend backend =
      ParseBackend(internal::ReadValue<std::string>(in, "backend"));
  internal::Expect(in, "game");
  const auto id = internal::ReadValue<std::string>(in, "game id");
  internal::Expect(in, "history");
  const int history = internal::ReadValue<int>(in, "history length");
  internal::Expect(in, "n_players");
  const int n_players = internal::ReadValue<int>(in, "n_players");
  const GameSpec& game = GameSpec::FromId(id, history);
  if (backend == Backend::kTabular) {
    return TabularModel::LoadBody(in, game, n_players);
  }
  return MlpModel::LoadBody(in, game, n_players);
}

inline std::unique_ptr<Model> MakeModel(Backend backend, const GameSpec& game,
                                        int n_players,
                                        const std::vector<int>& hidden,
                                        std::uint64_t seed) {
  if (backend == Backend::kTabular) {
    return std::make_unique<TabularModel>(game, n_players);
  }
  return std::make_unique<MlpModel>(game, n_players, hidden, seed);
}

}  // namespace teamzero

#endif  // TEAMZERO_EVALUATOR_HPP_
