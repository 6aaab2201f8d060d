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

#ifndef SGPG_SIMULATION_HPP_
#define SGPG_SIMULATION_HPP_

#include <vector>

#include "sgpg/game.hpp"
#include "sgpg/random.hpp"

namespace sgpg {

struct Step {
  int state = 0;
  int joint_action = 0;
};

// One episode tau = (s_t, a_t, r_t), t = 1..T(tau). Rewards are stored flat,
// step-major: reward(t, i) = rewards[t * num_players + i].
struct Trajectory {
  int num_players = 0;
  std::vector<Step> steps;
  std::vector<Scalar> rewards;

  int length() const { return static_cast<int>(steps.size()); }
  Scalar reward(int t, int player) const { return rewards[t * num_players + player]; }
  // R_i(tau), the total reward of one player.
  Scalar total_reward(int player) const;
};

// Plays one episode: s_1 ~ rho, a_t ~ pi(.|s_t), stop with probability
// zeta_{s_t, a_t}, otherwise move to s_{t+1} ~ P(.|s_t, a_t) / (1 - zeta).
// Throws MAX_LENGTH_EXCEEDED past ceil(200 / zeta) steps.
Trajectory sample_episode(const GameSpec& game, const PolicyProfile& pi, Rng& rng);
// Reuses the storage of `out`.
void sample_episode(const GameSpec& game, const PolicyProfile& pi, Rng& rng,
                    Trajectory& out);

struct MonteCarloEstimate {
  Scalar mean = 0.0;
  Scalar std_err = 0.0;
  long long episodes = 0;
};

// Mean and standard error of sum_t f(s_t, a_t) over independent episodes.
MonteCarloEstimate mc_functional(const GameSpec& game, const PolicyProfile& pi,
                                 const Matrix& f, long long n_episodes, Rng& rng);

// Empirical visits per state, averaged over episodes, with standard errors.
struct OccupancyEstimate {
  Vector mean;
  Vector std_err;
};
OccupancyEstimate mc_occupancy(const GameSpec& game, const PolicyProfile& pi,
                               long long n_episodes, Rng& rng);

}  // namespace sgpg

#endif  // SGPG_SIMULATION_HPP_
