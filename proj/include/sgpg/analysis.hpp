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

#ifndef SGPG_ANALYSIS_HPP_
#define SGPG_ANALYSIS_HPP_

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sgpg/game.hpp"
#include "sgpg/geometry.hpp"
#include "sgpg/learners.hpp"

namespace sgpg {

enum class Classification { kNotNash, kNash, kSosNash, kStrictNash };
std::string_view to_string(Classification c);

struct EquilibriumReport {
  bool is_nash = false;
  Scalar fos_residual = 0.0;
  bool is_deterministic = false;
  // c_{i,s} per (player, state); empty unless deterministic.
  Matrix strict_gaps;
  // Absent only when the Jacobian is undefined (boundary, non-vertex profile).
  std::optional<SosCertificate> sos;
  Classification classification = Classification::kNotNash;
};

EquilibriumReport classify_equilibrium(const GameSpec& game, const PolicyProfile& pi_star,
                                       Scalar tol = 1e-8);

// Deterministic profiles that no player can improve on with a deterministic
// unilateral deviation, judged on V_{i,rho} alone.
std::vector<PolicyProfile> brute_force_deterministic_nash(const GameSpec& game,
                                                          Scalar tol = 1e-10);

struct RateFit {
  Scalar slope = 0.0;
  Scalar std_err = 0.0;
  Scalar intercept = 0.0;
  int points = 0;
  int runs_used = 0;
  int runs_excluded = 0;
  Scalar exclusion_fraction = 0.0;
};

// Least-squares slope of log(mean dist_sq) against log n over [n_lo, n_hi],
// after averaging the mean curve in log-spaced bins (10 per decade). Runs whose
// largest distance to the target exceeds basin_radius are dropped and counted.
RateFit fit_rate(const std::vector<const RunLog*>& logs, std::pair<long long, long long> window,
                 std::optional<Scalar> basin_radius = std::nullopt);
RateFit fit_rate(const RunLog& log, std::pair<long long, long long> window);
// Same fit on a bare curve: dist_sq[k] belongs to n = k + 1.
RateFit fit_rate(const std::vector<Scalar>& dist_sq, std::pair<long long, long long> window);

// Smallest n0 with pi_n == pi_star exactly for every logged n >= n0.
std::optional<long long> detect_finite_convergence(const RunLog& log,
                                                   const PolicyProfile& pi_star);

// Order-of-magnitude scale (M S A / (c gamma))^{1/(1-p)} of the absorption
// time; infinite for p >= 1.
Scalar finite_time_scale(Scalar margin, int num_states, int total_actions, Scalar gap,
                         Scalar gamma, Scalar p);

}  // namespace sgpg

#endif  // SGPG_ANALYSIS_HPP_
