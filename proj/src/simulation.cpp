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

#include "sgpg/simulation.hpp"

#include <cmath>

namespace sgpg {

Scalar Trajectory::total_reward(int player) const {
  Scalar total = 0.0;
  for (int t = 0; t < length(); ++t) total += reward(t, player);
  return total;
}

void sample_episode(const GameSpec& game, const PolicyProfile& pi, Rng& rng,
                    Trajectory& out) {
  const GameShape& shape = pi.shape();
  const int n = shape.num_players();
  const auto cap = static_cast<int>(std::ceil(200.0 / game.zeta_min));
  out.num_players = n;
  out.steps.clear();
  out.rewards.clear();

  int state = rng.categorical(game.initial_dist);
  int per_player[16];
  std::vector<int> wide;
  int* actions = per_player;
  if (n > 16) {
    wide.resize(n);
    actions = wide.data();
  }
  while (true) {
    for (int i = 0; i < n; ++i) actions[i] = rng.categorical(pi.block(i, state));
    const int joint = shape.joint_index(std::span<const int>(actions, n));
    out.steps.push_back({state, joint});
    for (int i = 0; i < n; ++i) out.rewards.push_back(game.rewards[i](state, joint));
    const Scalar stop = game.stop_probs(state, joint);
    if (rng.uniform() < stop) break;
    if (out.length() >= cap) {
      throw Error(ErrorCode::kMaxLengthExceeded,
                  "episode exceeded " + std::to_string(cap) + " steps");
    }
    state = rng.categorical(game.transitions[state].row(joint), 1.0 - stop);
  }
}

Trajectory sample_episode(const GameSpec& game, const PolicyProfile& pi, Rng& rng) {
  Trajectory out;
  sample_episode(game, pi, rng, out);
  return out;
}

MonteCarloEstimate mc_functional(const GameSpec& game, const PolicyProfile& pi,
                                 const Matrix& f, long long n_episodes, Rng& rng) {
  if (n_episodes < 1) throw Error(ErrorCode::kBadParams, "n_episodes must be >= 1");
  if (f.rows() != game.num_states() || f.cols() != game.shape().num_joint_actions()) {
    throw Error(ErrorCode::kDimensionMismatch, "f must be |S| x |A|");
  }
  Trajectory traj;
  Scalar sum = 0.0, sum_sq = 0.0;
  for (long long e = 0; e < n_episodes; ++e) {
    sample_episode(game, pi, rng, traj);
    Scalar total = 0.0;
    for (const auto& step : traj.steps) total += f(step.state, step.joint_action);
    sum += total;
    sum_sq += total * total;
  }
  const auto count = static_cast<Scalar>(n_episodes);
  MonteCarloEstimate est;
  est.episodes = n_episodes;
  est.mean = sum / count;
  const Scalar var =
      n_episodes > 1 ? std::max(0.0, (sum_sq - count * est.mean * est.mean) / (count - 1)) : 0.0;
  est.std_err = std::sqrt(var / count);
  return est;
}

OccupancyEstimate mc_occupancy(const GameSpec& game, const PolicyProfile& pi,
                               long long n_episodes, Rng& rng) {
  if (n_episodes < 2) throw Error(ErrorCode::kBadParams, "n_episodes must be >= 2");
  const int S = game.num_states();
  Vector sum = Vector::Zero(S), sum_sq = Vector::Zero(S), counts(S);
  Trajectory traj;
  for (long long e = 0; e < n_episodes; ++e) {
    sample_episode(game, pi, rng, traj);
    counts.setZero();
    for (const auto& step : traj.steps) counts[step.state] += 1.0;
    sum += counts;
    sum_sq += counts.cwiseProduct(counts);
  }
  const auto n = static_cast<Scalar>(n_episodes);
  OccupancyEstimate est;
  est.mean = sum / n;
  const Vector var = ((sum_sq - n * est.mean.cwiseProduct(est.mean)) / (n - 1)).cwiseMax(0.0);
  est.std_err = (var / n).cwiseSqrt();
  return est;
}

}  // namespace sgpg
