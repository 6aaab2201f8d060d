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

#ifndef SGPG_LEARNERS_HPP_
#define SGPG_LEARNERS_HPP_

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sgpg/estimators.hpp"
#include "sgpg/game.hpp"
#include "sgpg/geometry.hpp"
#include "sgpg/random.hpp"

namespace sgpg {

enum class Algorithm { kPG, kLPG };
// kGeometric runs a constant-step, exact-gradient method; every other
// schedule must satisfy the stochastic step-size conditions.
enum class StepMode { kStandard, kGeometric };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(const std::string& name);
std::string_view to_string(StepMode mode);

// gamma_n = gamma / (n + m)^p, eps_n = eps0 / (n + m)^r_exp.
struct Schedule {
  Scalar gamma = 0.1;
  Scalar m = 0.0;
  Scalar p = 1.0;
  Scalar eps0 = 0.0;
  Scalar r_exp = 0.0;
  FeedbackModel model = FeedbackModel::kFull;
  StepMode mode = StepMode::kStandard;

  // Decay exponents of the bias bound and growth exponent of the noise bound
  // implied by the model (infinity / 0 for unbiased, bounded-noise models).
  Scalar ell_b() const;
  Scalar ell_sigma() const;
};

// Failed admissibility conditions, empty when the schedule is usable.
std::vector<std::string> schedule_violations(const Schedule& sched);
// Throws INADMISSIBLE_SCHEDULE listing every failed inequality.
void validate_schedule(const Schedule& sched);

struct StepSizes {
  Scalar gamma_n = 0.0;
  Scalar eps_n = 0.0;
};
StepSizes schedule_at(const Schedule& sched, long long n);

struct LearnerState {
  long long n = 1;
  PolicyProfile pi;
  std::optional<Vector> y;  // lazy scores, LPG only
};

// pi_{n+1} = proj(pi_n + gamma_n vhat_n).
LearnerState pg_step(const LearnerState& state, const GradientSignal& signal, Scalar gamma_n);
// y_{n+1} = y_n + gamma_n vhat_n, pi_{n+1} = proj(y_{n+1}).
LearnerState lpg_step(const LearnerState& state, const GradientSignal& signal, Scalar gamma_n);

struct RunRecord {
  long long n = 0;
  Scalar gamma_n = 0.0;
  Scalar eps_n = 0.0;
  Scalar dist_sq = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar energy = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar fos_residual = std::numeric_limits<Scalar>::quiet_NaN();
  bool exact_hit = false;
};

struct RunOptions {
  NoiseConfig noise;
  // Log the FOS residual every k iterations (0 disables; the last iteration
  // is always included when enabled).
  int fos_every = 0;
  // KKT certificate spot check period.
  int certificate_every = 100;
  bool keep_policies = false;
  std::string game_label;
};

using Initialization = std::variant<PolicyProfile, LazyScores>;

struct RunLog {
  std::string game_label;
  Algorithm algo = Algorithm::kPG;
  Schedule sched;
  NoiseConfig noise;
  long long horizon = 0;
  RngState rng;
  std::optional<PolicyProfile> pi_star;
  std::vector<RunRecord> records;
  std::vector<Vector> policies;  // pi_n per record when kept
  std::optional<PolicyProfile> final_pi;
  std::optional<long long> n0;
  std::optional<std::string> failure;
  double wall_seconds = 0.0;
};

// Thrown by run_experiment on a module error; carries the log up to the
// failing iteration.
class RunAborted : public Error {
 public:
  RunAborted(const Error& cause, RunLog partial)
      : Error(cause.code(), cause.what()), log_(std::move(partial)) {}
  const RunLog& log() const { return log_; }

 private:
  RunLog log_;
};

// Runs `horizon` iterations of PG or LPG. Records are 1-indexed and describe
// the policy pi_n in force during iteration n. Deterministic given `rng`.
RunLog run_experiment(const GameSpec& game, Algorithm algo, const Schedule& sched,
                      const Initialization& init, long long horizon,
                      const std::optional<PolicyProfile>& pi_star, RngState rng,
                      const RunOptions& options = {});

// Profile on the segment from pi_star toward the uniform profile at the
// given Euclidean distance.
PolicyProfile near_profile(const PolicyProfile& pi_star, Scalar radius);

}  // namespace sgpg

#endif  // SGPG_LEARNERS_HPP_
