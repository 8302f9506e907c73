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

// On-disk checkpoints and run manifests.
//
// A checkpoint directory holds
//   config.txt        training configuration (key = value)
//   params.txt        model parameters (hex floats)
//   team.txt          lambda, l0, beta and psi (hex floats)
//   team.csv          psi as a readable table
//   payoff.csv        cumulative matchup results
//   graph_first.csv   interaction graph, exploiter moving first
//   graph_second.csv  interaction graph, exploiter moving second
//   step.txt          learner step count

#ifndef TEAMZERO_CHECKPOINT_HPP_
#define TEAMZERO_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "teamzero/diversity.hpp"
#include "teamzero/evaluator.hpp"
#include "teamzero/league.hpp"
#include "teamzero/puzzles.hpp"
#include "teamzero/training.hpp"

#ifndef TEAMZERO_VERSION
#define TEAMZERO_VERSION "0.1.0"
#endif
#ifndef TEAMZERO_GIT_STAMP
#define TEAMZERO_GIT_STAMP "unknown"
#endif

namespace teamzero {

// Self-play start candidates from puzzles: the puzzle position plus the
// positions along its first solution line.
inline std::vector<StartCandidate> StartCandidatesFrom(const std::vector<Puzzle>& puzzles) {
  std::vector<StartCandidate> out;
  for (const auto& p : puzzles) {
    auto line = p.LinePositions();
    line.erase(line.begin());
    out.push_back(StartCandidate{p.position, p.family, std::move(line)});
  }
  return out;
}

namespace fs = std::filesystem;

class PersistenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void SaveTeam(std::ostream& out, const TeamState& team) {
  out << "teamzero-team 1\n";
  out << "n_players " << team.n_players << " dim " << team.feature_dim() << "\n";
  out << "l0 ";
  internal::WriteHex(out, team.l0);
  out << "\nbeta ";
  internal::WriteHex(out, team.beta);
  out << "\nlambda";
  for (double x : team.lambda) {
    out << ' ';
    internal::WriteHex(out, x);
  }
  out << '\n';
  for (const auto& psi : team.psi) {
    out << "psi";
    for (double x : psi) {
      out << ' ';
      internal::WriteHex(out, x);
    }
    out << '\n';
  }
}

inline TeamState LoadTeam(std::istream& in) {
  internal::Expect(in, "teamzero-team");
  if (internal::ReadValue<int>(in, "team version") != 1) {
    throw ParseError("unsupported team file version");
  }
  TeamState t;
  internal::Expect(in, "n_players");
  t.n_players = internal::ReadValue<int>(in, "n_players");
  internal::Expect(in, "dim");
  const int dim = internal::ReadValue<int>(in, "dim");
  if (t.n_players < 1 || dim < 1) throw ParseError("bad team dimensions");
  internal::Expect(in, "l0");
  t.l0 = internal::ReadHex(in);
  internal::Expect(in, "beta");
  t.beta = internal::ReadHex(in);
  internal::Expect(in, "lambda");
  for (int i = 0; i < t.n_players; ++i) t.lambda.push_back(internal::ReadHex(in));
  for (int i = 0; i < t.n_players; ++i) {
    internal::Expect(in, "psi");
    std::vector<double> psi;
    for (int k = 0; k < dim; ++k) psi.push_back(internal::ReadHex(in));
    t.psi.push_back(std::move(psi));
  }
  return t;
}

// CSV: schema,player,lambda,feature,psi
inline void WriteTeamCsv(std::ostream& out, const TeamState& team) {
  out << "schema,player,lambda,feature,psi\n";
  char buf[64];
  for (int i = 0; i < team.n_players; ++i) {
    for (int k = 0; k < team.feature_dim(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.10g,%d,%.10g", team.lambda[i], k,
                    team.psi[i][k]);
      out << "team.v1," << i << ',' << buf << '\n';
    }
  }
}

inline PayoffTable ReadPayoffCsv(std::istream& in, int n_players) {
  PayoffTable t(n_players);
  std::string line;
  if (!std::getline(in, line) || line != "schema,seat,i,j,wins,draws,losses,games") {
    throw ParseError("payoff CSV: unexpected header");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = internal::SplitOn(line, ",");
    if (f.size() != 8 || f[0] != "payoff.v1" ||
        (f[1] != "first" && f[1] != "second")) {
      throw ParseError("payoff CSV line " + std::to_string(line_no) + " malformed");
    }
    ResultCounts c;
    c.wins = internal::ParseIntStrict(f[4], "wins");
    c.draws = internal::ParseIntStrict(f[5], "draws");
    c.losses = internal::ParseIntStrict(f[6], "losses");
    c.games = internal::ParseIntStrict(f[7], "games");
    if (c.wins + c.draws + c.losses != c.games) {
      throw ParseError("payoff CSV line " + std::to_string(line_no) +
                       ": counts do not add up");
    }
    t.Set(f[1] == "first" ? Seat::kFirst : Seat::kSecond,
          internal::ParseIntStrict(f[2], "i"), internal::ParseIntStrict(f[3], "j"), c);
  }
  return t;
}

namespace internal {

inline void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PersistenceError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw PersistenceError("write failed for '" + path.string() + "'");
}

inline std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PersistenceError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename F>
std::string ToString(F write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace internal

inline void SaveCheckpoint(const fs::path& dir, const TrainConfig& config,
                           const Model& model, const TeamState& team,
                           const PayoffTable& payoffs, const GraphPair& graphs,
                           std::int64_t step) {
  fs::create_directories(dir);
  internal::WriteFile(dir / "config.txt", config.ToText());
  internal::WriteFile(dir / "params.txt",
                      internal::ToString([&](std::ostream& o) { model.Save(o); }));
  internal::WriteFile(dir / "team.txt",
                      internal::ToString([&](std::ostream& o) { SaveTeam(o, team); }));
  internal::WriteFile(dir / "team.csv", internal::ToString([&](std::ostream& o) {
                        WriteTeamCsv(o, team);
                      }));
  internal::WriteFile(dir / "payoff.csv", internal::ToString([&](std::ostream& o) {
                        payoffs.WriteCsv(o);
                      }));
  internal::WriteFile(dir / "graph_first.csv", internal::ToString([&](std::ostream& o) {
                        graphs[0].WriteCsv(o);
                      }));
  internal::WriteFile(dir / "graph_second.csv", internal::ToString([&](std::ostream& o) {
                        graphs[1].WriteCsv(o);
                      }));
  internal::WriteFile(dir / "step.txt", std::to_string(step) + "\n");
}

inline void SaveCheckpoint(const fs::path& dir, const Trainer& trainer) {
  SaveCheckpoint(dir, trainer.config(), trainer.model(), trainer.team(),
                 trainer.payoffs(), trainer.graphs(), trainer.step());
}

struct Checkpoint {
  TrainConfig config;
  std::unique_ptr<Model> model;
  TeamState team;
  PayoffTable payoffs;
  std::int64_t step = 0;
};

inline Checkpoint LoadCheckpoint(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw PersistenceError("checkpoint '" + dir.string() + "' is not a directory");
  }
  Checkpoint c;
  try {
    c.config = TrainConfig::Parse(internal::ReadFile(dir / "config.txt"));
    std::istringstream params(internal::ReadFile(dir / "params.txt"));
    c.model = Model::Load(params);
    std::istringstream team(internal::ReadFile(dir / "team.txt"));
    c.team = LoadTeam(team);
    std::istringstream payoff(internal::ReadFile(dir / "payoff.csv"));
    c.payoffs = ReadPayoffCsv(payoff, c.config.n_players);
    c.step = std::stoll(internal::ReadFile(dir / "step.txt"));
  } catch (const PersistenceError&) {
    throw;
  } catch (const std::exception& e) {
    throw PersistenceError("checkpoint '" + dir.string() + "': " + e.what());
  }
  if (c.model->n_players() != c.config.n_players ||
      c.team.n_players != c.config.n_players ||
      c.model->game().id != c.config.game ||
      c.team.feature_dim() != c.model->game().feature_dim()) {
    throw PersistenceError("checkpoint '" + dir.string() +
                           "': config, parameters and team disagree");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Manifest

inline const std::map<std::string, std::string>& SchemaVersions() {
  static const std::map<std::string, std::string> v = {
      {"metrics.csv", "metrics.v1"},       {"payoff.csv", "payoff.v1"},
      {"graph_first.csv", "graph.v1"},     {"graph_second.csv", "graph.v1"},
      {"team.csv", "team.v1"},             {"puzzles.csv", "puzzles.v1"},
      {"puzzle_summary.csv", "puzzle_summary.v1"},
      {"matches.csv", "matches.v1"},       {"match_summary.csv", "match_summary.v1"},
      {"occupancy_mean.csv", "occupancy_mean.v1"},
      {"occupancy_centered.csv", "occupancy_centered.v1"},
      {"occupancy_std.csv", "occupancy_std.v1"},
      {"openings.csv", "openings.v1"},     {"puzzles.txt", "teamzero-puzzles v1"},
      {"manifest.json", "manifest.v1"},
  };
  return v;
}

struct ExperimentManifest {
  std::string command;
  std::uint64_t seed = 0;
  bool seed_was_random = false;
  std::map<std::string, std::string> config;  // snapshot, key -> value
  std::vector<std::string> inputs;
  std::vector<std::string> checkpoints;
  std::vector<std::string> reports;

  nlohmann::ordered_json ToJson() const {
    nlohmann::ordered_json j;
    j["schema"] = "manifest.v1";
    j["command"] = command;
    j["version"] = TEAMZERO_VERSION;
    j["git"] = TEAMZERO_GIT_STAMP;
    j["seed"] = seed;
    j["seed_was_random"] = seed_was_random;
    j["config"] = nlohmann::ordered_json(config);
    j["inputs"] = inputs;
    j["checkpoints"] = checkpoints;
    j["reports"] = reports;
    nlohmann::ordered_json schemas;
    for (const auto& r : reports) {
      const std::string name = fs::path(r).filename().string();
      auto it = SchemaVersions().find(name);
      if (it != SchemaVersions().end()) schemas[name] = it->second;
    }
    j["schemas"] = schemas;
    return j;
  }

  void Write(const fs::path& dir) const {
    fs::create_directories(dir);
    internal::WriteFile(dir / "manifest.json", ToJson().dump(2) + "\n");
  }
};

}  // namespace teamzero

#endif  // TEAMZERO_CHECKPOINT_HPP_
