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

#include "sgpg/estimators.hpp"

#include <cmath>

#include "sgpg/exact.hpp"

namespace sgpg {

std::string_view to_string(FeedbackModel model) {
  switch (model) {
    case FeedbackModel::kFull: return "full";
    case FeedbackModel::kStochastic: return "stochastic";
    case FeedbackModel::kValueBased: return "value_based";
  }
  return "unknown";
}

FeedbackModel parse_feedback_model(const std::string& name) {
  if (name == "full") return FeedbackModel::kFull;
  if (name == "stochastic") return FeedbackModel::kStochastic;
  if (name == "value_based") return FeedbackModel::kValueBased;
  throw Error(ErrorCode::kBadParams, "model must be full, stochastic or value_based");
}

void reinforce_accumulate(const PolicyProfile& pi_hat, const Trajectory& traj, Vector& out,
                          Scalar weight) {
  const GameShape& shape = pi_hat.shape();
  for (int i = 0; i < shape.num_players(); ++i) {
    const Scalar R = traj.total_reward(i);
    if (R == 0.0) continue;
    for (const auto& step : traj.steps) {
      const int k = shape.index(i, step.state, shape.action_of(step.joint_action, i));
      const Scalar p = pi_hat.flat()[k];
      if (!(p > 0.0)) {
        throw Error(ErrorCode::kZeroProbabilityAction,
                    "trajectory plays an action with zero probability under pi_hat");
      }
      out[k] += weight * R / p;
    }
  }
}

Vector reinforce_estimate(const PolicyProfile& pi_hat, const Trajectory& traj) {
  Vector out = Vector::Zero(pi_hat.shape().dim());
  // Checked even when R_i(tau) = 0 so inconsistent trajectories always fail.
  const GameShape& shape = pi_hat.shape();
  for (const auto& step : traj.steps) {
    for (int i = 0; i < shape.num_players(); ++i) {
      if (!(pi_hat.prob(i, step.state, shape.action_of(step.joint_action, i)) > 0.0)) {
        throw Error(ErrorCode::kZeroProbabilityAction,
                    "trajectory plays an action with zero probability under pi_hat");
      }
    }
  }
  reinforce_accumulate(pi_hat, traj, out);
  return out;
}

PolicyProfile mix_policy(const PolicyProfile& pi, Scalar eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw Error(ErrorCode::kEpsOutOfRange, "exploration must lie in [0, 1]");
  }
  if (eps == 0.0) return pi;
  const GameShape& shape = pi.shape();
  Vector flat = (1.0 - eps) * pi.flat();
  for (int i = 0; i < shape.num_players(); ++i) {
    flat.segment(shape.player_offset(i), shape.player_dim(i)).array() +=
        eps / shape.num_actions(i);
  }
  return PolicyProfile(shape, std::move(flat));
}

Scalar bias_constant(const GameSpec& game) {
  const GameShape shape = game.shape();
  const Scalar A = shape.total_actions();
  return 3.0 * shape.num_players() * std::pow(A, 1.5) * std::sqrt(Scalar(shape.num_states())) /
         std::pow(game.zeta_min, 3);
}

GradientSignal make_signal(FeedbackModel model, const GameSpec& game, const PolicyProfile& pi,
                           Scalar eps, const NoiseConfig& noise, Rng& rng) {
  const GameShape& shape = pi.shape();
  GradientSignal signal;
  signal.model = model;
  switch (model) {
    case FeedbackModel::kFull: {
      signal.vhat = policy_gradient(game, pi).v;
      if (noise.instrumented) {
        signal.decomposition = SignalDecomposition{
            signal.vhat, Vector::Zero(shape.dim()), Vector::Zero(shape.dim())};
      }
      break;
    }
    case FeedbackModel::kStochastic: {
      if (!(noise.sigma >= 0.0)) throw Error(ErrorCode::kBadParams, "noise sigma must be >= 0");
      const Vector v = policy_gradient(game, pi).v;
      Vector xi(shape.dim());
      for (int k = 0; k < shape.dim(); ++k) {
        if (noise.kind == NoiseKind::kUniform) {
          xi[k] = rng.uniform(-noise.sigma, noise.sigma);
        } else {
          // Box-Muller, one draw per coordinate.
          const Scalar u1 = 1.0 - rng.uniform();
          const Scalar u2 = rng.uniform();
          xi[k] = noise.sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        }
      }
      signal.vhat = v + xi;
      signal.noise_bound = noise.kind == NoiseKind::kUniform
                               ? noise.sigma * std::sqrt(shape.dim() / 3.0)
                               : noise.sigma * std::sqrt(Scalar(shape.dim()));
      if (noise.instrumented) {
        signal.decomposition = SignalDecomposition{v, xi, Vector::Zero(shape.dim())};
      }
      break;
    }
    case FeedbackModel::kValueBased: {
      if (!(eps > 0.0 && eps <= 1.0)) {
        throw Error(ErrorCode::kEpsOutOfRange, "value-based feedback needs eps in (0, 1]");
      }
      if (noise.batch < 1) throw Error(ErrorCode::kBadParams, "batch must be >= 1");
      const PolicyProfile pi_hat = mix_policy(pi, eps);
      signal.vhat = Vector::Zero(shape.dim());
      Trajectory traj;
      const Scalar weight = 1.0 / noise.batch;
      for (int b = 0; b < noise.batch; ++b) {
        sample_episode(game, pi_hat, rng, traj);
        reinforce_accumulate(pi_hat, traj, signal.vhat, weight);
      }
      signal.bias_bound = bias_constant(game) * eps;
      Scalar var = 0.0;
      for (int i = 0; i < shape.num_players(); ++i) {
        const Scalar A = shape.num_actions(i);
        var += 24.0 * A * A / (eps * std::pow(game.zeta_min, 4));
      }
      signal.noise_bound = std::sqrt(var / noise.batch);
      if (noise.instrumented) {
        // REINFORCE matches the gradient at the sampling policy up to a shift
        // along each (player, state) block.
        const Vector v = policy_gradient(game, pi).v;
        const Vector mean = policy_gradient(game, pi_hat).v;
        signal.decomposition = SignalDecomposition{v, signal.vhat - mean, mean - v};
      }
      break;
    }
  }
  if (!signal.vhat.allFinite()) {
    throw Error(ErrorCode::kNonFiniteSignal, "gradient signal has non-finite entries");
  }
  return signal;
}

}  // namespace sgpg
