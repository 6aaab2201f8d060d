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

#include "sgpg/learners.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "sgpg/analysis.hpp"
#include "sgpg/exact.hpp"

namespace sgpg {

std::string_view to_string(Algorithm algo) {
  return algo == Algorithm::kPG ? "pg" : "lpg";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "pg") return Algorithm::kPG;
  if (name == "lpg") return Algorithm::kLPG;
  throw Error(ErrorCode::kBadParams, "algo must be pg or lpg");
}

std::string_view to_string(StepMode mode) {
  return mode == StepMode::kStandard ? "standard" : "geometric";
}

Scalar Schedule::ell_b() const {
  return model == FeedbackModel::kValueBased ? r_exp : std::numeric_limits<Scalar>::infinity();
}

Scalar Schedule::ell_sigma() const {
  return model == FeedbackModel::kValueBased ? r_exp / 2.0 : 0.0;
}

std::vector<std::string> schedule_violations(const Schedule& sched) {
  std::vector<std::string> failed;
  auto require = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };
  require(std::isfinite(sched.gamma) && sched.gamma > 0.0, "gamma > 0");
  require(std::isfinite(sched.m) && sched.m >= 0.0, "m >= 0");
  if (sched.mode == StepMode::kGeometric) {
    require(sched.model == FeedbackModel::kFull, "geometric mode requires model full");
    require(sched.p >= 0.0 && sched.p <= 1.0, "0 <= p <= 1");
    return failed;
  }
  require(sched.p <= 1.0, "p <= 1 (step sizes must not be summable)");
  require(sched.p > 0.5, "p > 1/2");
  if (sched.model == FeedbackModel::kValueBased) {
    require(sched.eps0 > 0.0 && sched.eps0 <= 1.0, "0 < eps0 <= 1");
    require(sched.r_exp > 0.0, "r_exp > 0");
    require(sched.p > 2.0 / 3.0, "p > 2/3 for value-based feedback");
    require(sched.p + sched.ell_b() > 1.0, "p + l_b > 1 (here l_b = r_exp)");
    require(sched.p - sched.ell_sigma() > 0.5, "p - l_sigma > 1/2 (here l_sigma = r_exp/2)");
  }
  return failed;
}

void validate_schedule(const Schedule& sched) {
  const auto failed = schedule_violations(sched);
  if (failed.empty()) return;
  std::string message = "failed: ";
  for (std::size_t k = 0; k < failed.size(); ++k) {
    if (k > 0) message += "; ";
    message += failed[k];
  }
  throw Error(ErrorCode::kInadmissibleSchedule, message);
}

StepSizes schedule_at(const Schedule& sched, long long n) {
  if (n < 1) throw Error(ErrorCode::kBadParams, "iterations are 1-indexed");
  const Scalar base = static_cast<Scalar>(n) + sched.m;
  StepSizes out;
  out.gamma_n = sched.gamma / std::pow(base, sched.p);
  if (sched.model == FeedbackModel::kValueBased) {
    out.eps_n = sched.eps0 / std::pow(base, sched.r_exp);
  }
  return out;
}

namespace {

void require_finite(const GradientSignal& signal, const PolicyProfile& pi) {
  if (signal.vhat.size() != pi.shape().dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "signal does not match the policy");
  }
  if (!signal.vhat.allFinite()) {
    throw Error(ErrorCode::kNonFiniteSignal, "gradient signal has non-finite entries");
  }
}

}  // namespace

LearnerState pg_step(const LearnerState& state, const GradientSignal& signal, Scalar gamma_n) {
  require_finite(signal, state.pi);
  LearnerState next;
  next.n = state.n + 1;
  next.pi = project_policy(state.pi.flat() + gamma_n * signal.vhat, state.pi.shape());
  return next;
}

LearnerState lpg_step(const LearnerState& state, const GradientSignal& signal, Scalar gamma_n) {
  if (!state.y) throw Error(ErrorCode::kBadParams, "lazy step needs scores");
  require_finite(signal, state.pi);
  LearnerState next;
  next.n = state.n + 1;
  next.y = *state.y + gamma_n * signal.vhat;
  next.pi = project_policy(*next.y, state.pi.shape());
  return next;
}

PolicyProfile near_profile(const PolicyProfile& pi_star, Scalar radius) {
  const PolicyProfile uniform = PolicyProfile::uniform(pi_star.shape());
  const Vector dir = uniform.flat() - pi_star.flat();
  const Scalar span = dir.norm();
  if (!(radius >= 0.0) || radius > span) {
    throw Error(ErrorCode::kBadParams, "radius must lie in [0, " + std::to_string(span) + "]");
  }
  if (span == 0.0) return pi_star;
  return PolicyProfile(pi_star.shape(), pi_star.flat() + (radius / span) * dir);
}

RunLog run_experiment(const GameSpec& game, Algorithm algo, const Schedule& sched,
                      const Initialization& init, long long horizon,
                      const std::optional<PolicyProfile>& pi_star, RngState rng_state,
                      const RunOptions& options) {
  validate_schedule(sched);
  if (horizon < 1) throw Error(ErrorCode::kBadParams, "horizon must be >= 1");
  const GameShape shape = game.shape();

  LearnerState state;
  if (const auto* pi0 = std::get_if<PolicyProfile>(&init)) {
    if (!(pi0->shape() == shape)) throw Error(ErrorCode::kDimensionMismatch, "init shape");
    if (!pi0->is_feasible(1e-12)) {
      throw Error(ErrorCode::kInfeasiblePolicy, "initial policy must be feasible");
    }
    state.pi = *pi0;
    if (algo == Algorithm::kLPG) state.y = pi0->flat();
  } else {
    const auto& scores = std::get<LazyScores>(init);
    if (!(scores.shape == shape)) throw Error(ErrorCode::kDimensionMismatch, "init shape");
    if (!scores.y.allFinite()) throw Error(ErrorCode::kNonFiniteInput, "initial scores");
    state.pi = project_policy(scores);
    if (algo == Algorithm::kLPG) state.y = scores.y;
  }
  if (pi_star && !(pi_star->shape() == shape)) {
    throw Error(ErrorCode::kDimensionMismatch, "pi_star shape");
  }

  RunLog log;
  log.game_label = options.game_label;
  log.algo = algo;
  log.sched = sched;
  log.noise = options.noise;
  log.horizon = horizon;
  log.rng = rng_state;
  log.pi_star = pi_star;
  log.records.reserve(static_cast<std::size_t>(horizon));

  const auto started = std::chrono::steady_clock::now();
  Rng rng(rng_state);
  try {
    for (long long n = 1; n <= horizon; ++n) {
      state.n = n;
      if (!state.pi.is_feasible(1e-12)) {
        throw Error(ErrorCode::kInvariantBreach,
                    "iterate " + std::to_string(n) + " left the policy space");
      }
      const StepSizes steps = schedule_at(sched, n);
      RunRecord record;
      record.n = n;
      record.gamma_n = steps.gamma_n;
      record.eps_n = steps.eps_n;
      if (pi_star) {
        record.dist_sq = (state.pi.flat() - pi_star->flat()).squaredNorm();
        record.energy = 0.5 * record.dist_sq;
        record.exact_hit = state.pi.flat() == pi_star->flat();
      }
      if (options.fos_every > 0 && ((n - 1) % options.fos_every == 0 || n == horizon)) {
        record.fos_residual = fos_residual(game, state.pi);
      }
      log.records.push_back(record);
      if (options.keep_policies) log.policies.push_back(state.pi.flat());

      const GradientSignal signal =
          make_signal(sched.model, game, state.pi, steps.eps_n, options.noise, rng);
      if (options.certificate_every > 0 && n % options.certificate_every == 0) {
        const Vector input = algo == Algorithm::kPG
                                 ? Vector(state.pi.flat() + steps.gamma_n * signal.vhat)
                                 : Vector(*state.y + steps.gamma_n * signal.vhat);
        if (input.allFinite() && projection_certificate_violation(input, shape) > 1e-10) {
          throw Error(ErrorCode::kInvariantBreach,
                      "projection certificate failed at iteration " + std::to_string(n));
        }
      }
      state = algo == Algorithm::kPG ? pg_step(state, signal, steps.gamma_n)
                                     : lpg_step(state, signal, steps.gamma_n);
    }
  } catch (const Error& e) {
    log.failure = e.what();
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    throw RunAborted(e, std::move(log));
  }
  log.final_pi = state.pi;
  if (pi_star && pi_star->is_deterministic()) {
    log.n0 = detect_finite_convergence(log, *pi_star);
  }
  log.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return log;
}

}  // namespace sgpg
