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

#ifndef SGPG_ESTIMATORS_HPP_
#define SGPG_ESTIMATORS_HPP_

#include <optional>
#include <string>

#include "sgpg/game.hpp"
#include "sgpg/random.hpp"
#include "sgpg/simulation.hpp"

namespace sgpg {

// Feedback models: exact gradients, gradients plus zero-mean noise, and
// REINFORCE on one epsilon-greedy episode.
enum class FeedbackModel { kFull, kStochastic, kValueBased };

std::string_view to_string(FeedbackModel model);
FeedbackModel parse_feedback_model(const std::string& name);

enum class NoiseKind { kUniform, kGaussian };

struct NoiseConfig {
  NoiseKind kind = NoiseKind::kUniform;
  // Half-width of the uniform noise, or standard deviation of the Gaussian.
  Scalar sigma = 0.0;
  // Episodes averaged per value-based signal.
  int batch = 1;
  // Fill the (true gradient, noise, bias) decomposition from the exact engine.
  bool instrumented = false;
};

struct SignalDecomposition {
  Vector v;     // v(pi_n)
  Vector xi;    // vhat - E[vhat | F_n]
  Vector bias;  // E[vhat | F_n] - v(pi_n)
};

struct GradientSignal {
  Vector vhat;
  FeedbackModel model = FeedbackModel::kFull;
  Scalar bias_bound = 0.0;   // B_n
  Scalar noise_bound = 0.0;  // sigma_n, bound on sqrt(E ||xi||^2)
  std::optional<SignalDecomposition> decomposition;
};

// The log-trick estimate R_i(tau) * sum_t grad_i log pi_hat_i(a_{i,t} | s_t),
// flat over (player, state, own action). The gradient of the log is
// 1 / pi_hat at the played coordinate and zero elsewhere.
Vector reinforce_estimate(const PolicyProfile& pi_hat, const Trajectory& traj);
// Accumulates into `out` (already sized and zeroed).
void reinforce_accumulate(const PolicyProfile& pi_hat, const Trajectory& traj, Vector& out,
                          Scalar weight = 1.0);

// (1 - eps) pi_i + eps Unif(A_i) in every state.
PolicyProfile mix_policy(const PolicyProfile& pi, Scalar eps);

// G = 3 n A^{3/2} sqrt(|S|) / zeta^3 with A = sum_i A_i.
Scalar bias_constant(const GameSpec& game);

// Builds the gradient signal for one iteration of the chosen model.
GradientSignal make_signal(FeedbackModel model, const GameSpec& game, const PolicyProfile& pi,
                           Scalar eps, const NoiseConfig& noise, Rng& rng);

}  // namespace sgpg

#endif  // SGPG_ESTIMATORS_HPP_
