// Copyright 2026 The SGPG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SGPG_GAME_HPP_
#define SGPG_GAME_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sgpg/core.hpp"

namespace sgpg {

// Index arithmetic for a tabular game: joint actions are flattened row-major
// over players in declaration order, and policy coordinates are laid out as
// (player, state, own action) with each player's |S| x A_i block contiguous.
class GameShape {
 public:
  GameShape() = default;
  GameShape(int num_states, std::vector<int> actions);

  int num_states() const { return num_states_; }
  int num_players() const { return static_cast<int>(actions_.size()); }
  int num_actions(int player) const { return actions_[player]; }
  const std::vector<int>& actions() const { return actions_; }
  int num_joint_actions() const { return num_joint_; }
  // Sum of A_i over players.
  int total_actions() const { return total_actions_; }
  // Flattened policy dimension |S| * sum_i A_i.
  int dim() const { return num_states_ * total_actions_; }

  int player_offset(int player) const { return player_offsets_[player]; }
  int player_dim(int player) const { return num_states_ * actions_[player]; }
  int block_offset(int player, int state) const {
    return player_offsets_[player] + state * actions_[player];
  }
  int index(int player, int state, int action) const {
    return block_offset(player, state) + action;
  }

  int action_of(int joint, int player) const {
    return (joint / strides_[player]) % actions_[player];
  }
  int joint_index(std::span<const int> per_player) const;

  friend bool operator==(const GameShape&, const GameShape&) = default;

 private:
  int num_states_ = 0;
  std::vector<int> actions_;
  std::vector<int> strides_;
  std::vector<int> player_offsets_;
  int num_joint_ = 0;
  int total_actions_ = 0;
};

// A policy profile pi = (pi_i(.|s)) stored as one flat vector. Profiles built
// with `raw` may leave the product of simplices; the exact engine evaluates
// the smooth extension of values there (used by finite differences).
class PolicyProfile {
 public:
  PolicyProfile() = default;
  PolicyProfile(GameShape shape, Vector flat);

  static PolicyProfile uniform(const GameShape& shape);
  // choices[i][s] = action played by player i at state s.
  static PolicyProfile deterministic(const GameShape& shape,
                                     const std::vector<std::vector<int>>& choices);
  // Validates rows (nonnegative, sum to one within tol).
  static PolicyProfile checked(GameShape shape, Vector flat, Scalar tol = 1e-12);

  const GameShape& shape() const { return shape_; }
  const Vector& flat() const { return flat_; }
  Vector& flat() { return flat_; }

  auto block(int player, int state) const {
    return flat_.segment(shape_.block_offset(player, state),
                         shape_.num_actions(player));
  }
  auto block(int player, int state) {
    return flat_.segment(shape_.block_offset(player, state),
                         shape_.num_actions(player));
  }
  auto player_block(int player) const {
    return flat_.segment(shape_.player_offset(player), shape_.player_dim(player));
  }

  Scalar prob(int player, int state, int action) const {
    return flat_[shape_.index(player, state, action)];
  }
  // Joint action distribution at a state, product of per-player rows.
  Vector joint_probs(int state) const;

  // kappa_i = min_{s, a_i} pi_i(a_i | s).
  Scalar min_prob(int player) const;
  Scalar min_prob() const;
  bool is_feasible(Scalar tol = 1e-12) const;
  bool is_deterministic() const;
  // Per player and state, the played action; requires is_deterministic().
  std::vector<std::vector<int>> pure_choices() const;

  friend bool operator==(const PolicyProfile& a, const PolicyProfile& b) {
    return a.shape_ == b.shape_ && a.flat_ == b.flat_;
  }

 private:
  GameShape shape_;
  Vector flat_;
};

struct PlayerSpec {
  std::string name;
  int actions = 0;

  friend bool operator==(const PlayerSpec&, const PlayerSpec&) = default;
};

// Gamma = (S, N, {A_i, r_i}, P, zeta, rho). `stop_probs` and `zeta_min` are
// derived by validate_game and never read from input.
struct GameSpec {
  std::vector<std::string> states;
  std::vector<PlayerSpec> players;
  std::vector<Matrix> rewards;      // [player] -> |S| x |A|
  std::vector<Matrix> transitions;  // [state]  -> |A| x |S|, P(s' | s, a)
  Matrix stop_probs;                // |S| x |A|
  Scalar zeta_min = 0.0;
  Vector initial_dist;

  GameShape shape() const;
  int num_states() const { return static_cast<int>(states.size()); }
  int num_players() const { return static_cast<int>(players.size()); }
};

bool operator==(const GameSpec& a, const GameSpec& b);

// Every violated invariant of a candidate game. `row_tol` bounds how far the
// initial distribution may be from summing to one before re-normalization.
std::vector<Issue> check_game(const GameSpec& raw, Scalar row_tol = 1e-12);

// Returns the validated game with stop probabilities derived and rows
// re-normalized, or throws ValidationError listing every issue.
GameSpec validate_game(const GameSpec& raw, Scalar row_tol = 1e-12,
                       std::vector<std::string>* warnings = nullptr);

// JSON game files. Loading applies validate_game with tolerance 1e-9.
GameSpec game_from_json_text(const std::string& text,
                             std::vector<std::string>* warnings = nullptr);
std::string game_to_json_text(const GameSpec& game);
GameSpec load_game(const std::filesystem::path& path,
                   std::vector<std::string>* warnings = nullptr);
void save_game(const GameSpec& game, const std::filesystem::path& path);

using GameParams = std::map<std::string, std::string>;

// Builtin desk-scale instances: single_state, coord2, pennies2, handoff2,
// random. See README for their definitions.
GameSpec builtin_game(const std::string& name, const GameParams& params = {});

// A one-state game with constant stopping probability; payoffs[i] is player
// i's reward over flat joint actions.
GameSpec single_state_game(Scalar zeta, std::vector<int> actions,
                           const std::vector<Vector>& payoffs);

// Random game: rewards uniform on [-1, 1], transition rows Dirichlet(1)
// rescaled so every stopping probability equals zeta, rho Dirichlet(1).
GameSpec random_game(std::uint64_t seed, int num_states, std::vector<int> actions,
                     Scalar zeta);

// Resolves "builtin:<name>[:k=v,k=v]" or a file path.
GameSpec resolve_game(const std::string& spec,
                      std::vector<std::string>* warnings = nullptr);

}  // namespace sgpg

#endif  // SGPG_GAME_HPP_
