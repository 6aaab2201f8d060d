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

#include "sgpg/game.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "sgpg/random.hpp"

namespace sgpg {

GameShape::GameShape(int num_states, std::vector<int> actions)
    : num_states_(num_states), actions_(std::move(actions)) {
  if (num_states_ < 1 || actions_.empty()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "a game needs at least one state and one player");
  }
  const int n = num_players();
  strides_.assign(n, 1);
  player_offsets_.assign(n, 0);
  num_joint_ = 1;
  for (int i = n - 1; i >= 0; --i) {
    if (actions_[i] < 1) {
      throw Error(ErrorCode::kDimensionMismatch, "player action count must be >= 1");
    }
    strides_[i] = num_joint_;
    num_joint_ *= actions_[i];
  }
  total_actions_ = 0;
  for (int i = 0; i < n; ++i) {
    player_offsets_[i] = num_states_ * total_actions_;
    total_actions_ += actions_[i];
  }
}

int GameShape::joint_index(std::span<const int> per_player) const {
  int joint = 0;
  for (int i = 0; i < num_players(); ++i) joint += per_player[i] * strides_[i];
  return joint;
}

PolicyProfile::PolicyProfile(GameShape shape, Vector flat)
    : shape_(std::move(shape)), flat_(std::move(flat)) {
  if (flat_.size() != shape_.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "policy vector has " + std::to_string(flat_.size()) +
                    " entries, expected " + std::to_string(shape_.dim()));
  }
}

PolicyProfile PolicyProfile::uniform(const GameShape& shape) {
  Vector flat(shape.dim());
  for (int i = 0; i < shape.num_players(); ++i) {
    flat.segment(shape.player_offset(i), shape.player_dim(i))
        .setConstant(1.0 / shape.num_actions(i));
  }
  return PolicyProfile(shape, std::move(flat));
}

PolicyProfile PolicyProfile::deterministic(
    const GameShape& shape, const std::vector<std::vector<int>>& choices) {
  if (static_cast<int>(choices.size()) != shape.num_players()) {
    throw Error(ErrorCode::kDimensionMismatch, "one choice row per player expected");
  }
  Vector flat = Vector::Zero(shape.dim());
  for (int i = 0; i < shape.num_players(); ++i) {
    if (static_cast<int>(choices[i].size()) != shape.num_states()) {
      throw Error(ErrorCode::kDimensionMismatch, "one choice per state expected");
    }
    for (int s = 0; s < shape.num_states(); ++s) {
      const int a = choices[i][s];
      if (a < 0 || a >= shape.num_actions(i)) {
        throw Error(ErrorCode::kBadParams, "action index out of range");
      }
      flat[shape.index(i, s, a)] = 1.0;
    }
  }
  return PolicyProfile(shape, std::move(flat));
}

PolicyProfile PolicyProfile::checked(GameShape shape, Vector flat, Scalar tol) {
  PolicyProfile pi(std::move(shape), std::move(flat));
  if (!pi.flat_.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "policy has non-finite entries");
  }
  if (!pi.is_feasible(tol)) {
    throw Error(ErrorCode::kInfeasiblePolicy,
                "policy rows must be nonnegative and sum to one");
  }
  return pi;
}

Vector PolicyProfile::joint_probs(int state) const {
  const int joint = shape_.num_joint_actions();
  Vector probs(joint);
  for (int a = 0; a < joint; ++a) {
    Scalar p = 1.0;
    for (int i = 0; i < shape_.num_players(); ++i) {
      p *= flat_[shape_.index(i, state, shape_.action_of(a, i))];
    }
    probs[a] = p;
  }
  return probs;
}

Scalar PolicyProfile::min_prob(int player) const {
  return player_block(player).minCoeff();
}

Scalar PolicyProfile::min_prob() const { return flat_.minCoeff(); }

bool PolicyProfile::is_feasible(Scalar tol) const {
  if (!flat_.allFinite() || flat_.minCoeff() < -tol) return false;
  for (int i = 0; i < shape_.num_players(); ++i) {
    for (int s = 0; s < shape_.num_states(); ++s) {
      if (std::abs(block(i, s).sum() - 1.0) > tol) return false;
    }
  }
  return true;
}

bool PolicyProfile::is_deterministic() const {
  for (int i = 0; i < shape_.num_players(); ++i) {
    for (int s = 0; s < shape_.num_states(); ++s) {
      const auto row = block(i, s);
      int ones = 0;
      for (int a = 0; a < row.size(); ++a) {
        if (row[a] == 1.0) {
          ++ones;
        } else if (row[a] != 0.0) {
          return false;
        }
      }
      if (ones != 1) return false;
    }
  }
  return true;
}

std::vector<std::vector<int>> PolicyProfile::pure_choices() const {
  if (!is_deterministic()) {
    throw Error(ErrorCode::kNotDeterministicTarget, "policy is not deterministic");
  }
  std::vector<std::vector<int>> choices(shape_.num_players(),
                                        std::vector<int>(shape_.num_states()));
  for (int i = 0; i < shape_.num_players(); ++i) {
    for (int s = 0; s < shape_.num_states(); ++s) {
      block(i, s).maxCoeff(&choices[i][s]);
    }
  }
  return choices;
}

GameShape GameSpec::shape() const {
  std::vector<int> actions;
  actions.reserve(players.size());
  for (const auto& p : players) actions.push_back(p.actions);
  return GameShape(num_states(), std::move(actions));
}

bool operator==(const GameSpec& a, const GameSpec& b) {
  if (a.states != b.states || a.players != b.players ||
      a.rewards.size() != b.rewards.size() ||
      a.transitions.size() != b.transitions.size() ||
      a.zeta_min != b.zeta_min || a.initial_dist != b.initial_dist ||
      a.stop_probs != b.stop_probs) {
    return false;
  }
  for (std::size_t k = 0; k < a.rewards.size(); ++k) {
    if (a.rewards[k] != b.rewards[k]) return false;
  }
  for (std::size_t k = 0; k < a.transitions.size(); ++k) {
    if (a.transitions[k] != b.transitions[k]) return false;
  }
  return true;
}

namespace {

std::string where(int s, int a) {
  return "state " + std::to_string(s) + ", joint action " + std::to_string(a);
}

}  // namespace

std::vector<Issue> check_game(const GameSpec& raw, Scalar row_tol) {
  std::vector<Issue> issues;
  const int S = raw.num_states();
  const int n = raw.num_players();
  if (S < 1) issues.push_back({ErrorCode::kDimensionMismatch, "no states"});
  if (n < 1) issues.push_back({ErrorCode::kDimensionMismatch, "no players"});
  int joint = 1;
  for (const auto& p : raw.players) {
    if (p.actions < 1) {
      issues.push_back({ErrorCode::kDimensionMismatch,
                        "player '" + p.name + "' has no actions"});
    } else {
      joint *= p.actions;
    }
  }
  if (!issues.empty()) return issues;

  if (static_cast<int>(raw.rewards.size()) != n) {
    issues.push_back({ErrorCode::kDimensionMismatch, "rewards must have one table per player"});
  } else {
    for (int i = 0; i < n; ++i) {
      if (raw.rewards[i].rows() != S || raw.rewards[i].cols() != joint) {
        issues.push_back({ErrorCode::kDimensionMismatch,
                          "rewards of player " + std::to_string(i) + " must be |S| x |A|"});
      }
    }
  }
  if (static_cast<int>(raw.transitions.size()) != S) {
    issues.push_back({ErrorCode::kDimensionMismatch, "transitions must have one table per state"});
  } else {
    for (int s = 0; s < S; ++s) {
      if (raw.transitions[s].rows() != joint || raw.transitions[s].cols() != S) {
        issues.push_back({ErrorCode::kDimensionMismatch,
                          "transitions of state " + std::to_string(s) + " must be |A| x |S|"});
      }
    }
  }
  if (raw.initial_dist.size() != S) {
    issues.push_back({ErrorCode::kDimensionMismatch, "initial_dist must have |S| entries"});
  }
  if (!issues.empty()) return issues;

  for (int i = 0; i < n; ++i) {
    const Matrix& r = raw.rewards[i];
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < joint; ++a) {
        const Scalar v = r(s, a);
        if (!std::isfinite(v)) {
          issues.push_back({ErrorCode::kNonFiniteInput,
                            "reward of player " + std::to_string(i) + " at " + where(s, a)});
        } else if (v < -1.0 || v > 1.0) {
          issues.push_back({ErrorCode::kRewardOutOfRange,
                            "reward " + std::to_string(v) + " of player " +
                                std::to_string(i) + " at " + where(s, a)});
        }
      }
    }
  }
  for (int s = 0; s < S; ++s) {
    const Matrix& P = raw.transitions[s];
    for (int a = 0; a < joint; ++a) {
      if (!P.row(a).allFinite()) {
        issues.push_back({ErrorCode::kNonFiniteInput, "transition row at " + where(s, a)});
        continue;
      }
      if (P.row(a).minCoeff() < 0.0) {
        issues.push_back({ErrorCode::kNegativeProbability,
                          "transition probability at " + where(s, a)});
        continue;
      }
      const Scalar mass = P.row(a).sum();
      if (mass > 1.0 + row_tol) {
        issues.push_back({ErrorCode::kRowSumMismatch,
                          "transition mass " + std::to_string(mass) + " exceeds one at " +
                              where(s, a)});
      } else if (1.0 - mass <= 0.0) {
        issues.push_back({ErrorCode::kZeroStopProbability,
                          "stopping probability is zero at " + where(s, a)});
      }
    }
  }
  const Vector& rho = raw.initial_dist;
  if (!rho.allFinite()) {
    issues.push_back({ErrorCode::kNonFiniteInput, "initial_dist"});
  } else {
    for (int s = 0; s < S; ++s) {
      if (rho[s] < 0.0) {
        issues.push_back({ErrorCode::kNegativeProbability,
                          "initial_dist at state " + std::to_string(s)});
      } else if (rho[s] == 0.0) {
        issues.push_back({ErrorCode::kEmptySupportInitialDist,
                          "initial_dist has no mass on state " + std::to_string(s)});
      }
    }
    if (std::abs(rho.sum() - 1.0) > row_tol) {
      issues.push_back({ErrorCode::kRowSumMismatch,
                        "initial_dist sums to " + std::to_string(rho.sum())});
    }
  }
  return issues;
}

GameSpec validate_game(const GameSpec& raw, Scalar row_tol,
                       std::vector<std::string>* warnings) {
  auto issues = check_game(raw, row_tol);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  GameSpec game = raw;
  const Scalar rho_sum = game.initial_dist.sum();
  if (rho_sum != 1.0) {
    game.initial_dist /= rho_sum;
    if (warnings != nullptr && std::abs(rho_sum - 1.0) > 1e-15) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "initial_dist summed to " << rho_sum << "; re-normalized";
      warnings->push_back(msg.str());
    }
  }
  const int S = game.num_states();
  const int joint = game.shape().num_joint_actions();
  game.stop_probs.resize(S, joint);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < joint; ++a) {
      game.stop_probs(s, a) = 1.0 - game.transitions[s].row(a).sum();
    }
  }
  game.zeta_min = game.stop_probs.minCoeff();
  return game;
}

GameSpec single_state_game(Scalar zeta, std::vector<int> actions,
                           const std::vector<Vector>& payoffs) {
  if (!(zeta > 0.0 && zeta <= 1.0)) {
    throw Error(ErrorCode::kBadParams, "zeta must lie in (0, 1]");
  }
  GameSpec raw;
  raw.states = {"s0"};
  for (std::size_t i = 0; i < actions.size(); ++i) {
    raw.players.push_back({"p" + std::to_string(i + 1), actions[i]});
  }
  const GameShape shape(1, actions);
  if (payoffs.size() != actions.size()) {
    throw Error(ErrorCode::kBadParams, "one payoff vector per player expected");
  }
  for (const auto& u : payoffs) {
    if (u.size() != shape.num_joint_actions()) {
      throw Error(ErrorCode::kBadParams, "payoff vector must cover every joint action");
    }
    raw.rewards.push_back(u.transpose());
  }
  raw.transitions = {Matrix::Constant(shape.num_joint_actions(), 1, 1.0 - zeta)};
  raw.initial_dist = Vector::Ones(1);
  return validate_game(raw);
}

GameSpec random_game(std::uint64_t seed, int num_states, std::vector<int> actions,
                     Scalar zeta) {
  if (num_states < 1 || actions.empty() || !(zeta > 0.0 && zeta <= 1.0)) {
    throw Error(ErrorCode::kBadParams,
                "random game needs states >= 1, at least one player, zeta in (0, 1]");
  }
  Rng rng(RngState{seed, 0x67616d65ULL});
  GameSpec raw;
  for (int s = 0; s < num_states; ++s) raw.states.push_back("s" + std::to_string(s));
  for (std::size_t i = 0; i < actions.size(); ++i) {
    raw.players.push_back({"p" + std::to_string(i + 1), actions[i]});
  }
  const GameShape shape(num_states, actions);
  const int joint = shape.num_joint_actions();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    Matrix r(num_states, joint);
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < joint; ++a) r(s, a) = rng.uniform(-1.0, 1.0);
    }
    raw.rewards.push_back(std::move(r));
  }
  for (int s = 0; s < num_states; ++s) {
    Matrix P(joint, num_states);
    for (int a = 0; a < joint; ++a) {
      for (int t = 0; t < num_states; ++t) P(a, t) = rng.exponential();
      P.row(a) *= (1.0 - zeta) / P.row(a).sum();
    }
    raw.transitions.push_back(std::move(P));
  }
  raw.initial_dist.resize(num_states);
  for (int s = 0; s < num_states; ++s) raw.initial_dist[s] = rng.exponential() + 1e-3;
  raw.initial_dist /= raw.initial_dist.sum();
  return validate_game(raw, 1e-12);
}

namespace {

Vector coordination_payoff() { return (Vector(4) << 1, -1, -1, 1).finished(); }

Scalar param_real(const GameParams& params, const std::string& key, Scalar fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const Scalar v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kBadParams, "parameter '" + key + "' is not a number");
  }
}

long long param_int(const GameParams& params, const std::string& key, long long fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kBadParams, "parameter '" + key + "' is not an integer");
  }
}

std::vector<int> param_actions(const GameParams& params, const std::string& fallback) {
  const auto it = params.find("actions");
  const std::string text = it == params.end() ? fallback : it->second;
  std::vector<int> actions;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    try {
      actions.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kBadParams, "actions must look like 2x3");
    }
  }
  if (actions.empty()) throw Error(ErrorCode::kBadParams, "actions must look like 2x3");
  return actions;
}

void require_known(const GameParams& params, const std::set<std::string>& known,
                   const std::string& name) {
  for (const auto& [key, value] : params) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::kBadParams,
                  "unknown parameter '" + key + "' for builtin '" + name + "'");
    }
  }
}

GameSpec handoff2(Scalar rho0) {
  if (!(rho0 > 0.0 && rho0 < 1.0)) {
    throw Error(ErrorCode::kBadParams, "rho0 must lie in (0, 1) for full support");
  }
  GameSpec raw;
  raw.states = {"s0", "s1"};
  raw.players = {{"p1", 2}, {"p2", 2}};
  // Joint index: 0 = (0,0), 1 = (0,1), 2 = (1,0), 3 = (1,1).
  Matrix r = Matrix::Zero(2, 4);
  r(0, 0) = 0.2;
  r.row(1) << -1, -1, -1, 1;
  raw.rewards = {r, r};
  Matrix P0 = Matrix::Zero(4, 2);
  P0(0, 1) = 0.5;
  raw.transitions = {P0, Matrix::Zero(4, 2)};
  raw.initial_dist = (Vector(2) << rho0, 1.0 - rho0).finished();
  return validate_game(raw);
}

}  // namespace

GameSpec builtin_game(const std::string& name, const GameParams& params) {
  if (name == "coord2") {
    require_known(params, {}, name);
    return single_state_game(0.5, {2, 2}, {coordination_payoff(), coordination_payoff()});
  }
  if (name == "pennies2") {
    require_known(params, {}, name);
    const Vector r1 = coordination_payoff();
    return single_state_game(0.5, {2, 2}, {r1, -r1});
  }
  if (name == "single_state") {
    require_known(params, {"zeta", "payoff"}, name);
    const Scalar zeta = param_real(params, "zeta", 0.5);
    const auto it = params.find("payoff");
    const std::string payoff = it == params.end() ? "coordination" : it->second;
    const Vector r1 = coordination_payoff();
    if (payoff == "coordination") return single_state_game(zeta, {2, 2}, {r1, r1});
    if (payoff == "pennies") return single_state_game(zeta, {2, 2}, {r1, -r1});
    if (payoff == "zero") {
      return single_state_game(zeta, {2, 2}, {Vector::Zero(4), Vector::Zero(4)});
    }
    throw Error(ErrorCode::kBadParams, "payoff must be coordination, pennies or zero");
  }
  if (name == "handoff2") {
    require_known(params, {"rho0"}, name);
    return handoff2(param_real(params, "rho0", 0.9));
  }
  if (name == "random") {
    require_known(params, {"seed", "states", "actions", "zeta"}, name);
    const long long seed = param_int(params, "seed", 0);
    const long long states = param_int(params, "states", 2);
    if (seed < 0 || states < 1 || states > 4096) {
      throw Error(ErrorCode::kBadParams, "seed must be >= 0 and states in [1, 4096]");
    }
    return random_game(static_cast<std::uint64_t>(seed), static_cast<int>(states),
                       param_actions(params, "2x2"), param_real(params, "zeta", 0.5));
  }
  throw Error(ErrorCode::kUnknownName, "no builtin game named '" + name + "'");
}

GameSpec resolve_game(const std::string& spec, std::vector<std::string>* warnings) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0) return load_game(spec, warnings);
  const std::string rest = spec.substr(prefix.size());
  const auto colon = rest.find(':');
  const std::string name = rest.substr(0, colon);
  GameParams params;
  if (colon != std::string::npos) {
    std::stringstream ss(rest.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorCode::kBadParams, "builtin parameters must be key=value");
      }
      params[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }
  return builtin_game(name, params);
}

}  // namespace sgpg
