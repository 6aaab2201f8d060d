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

#ifndef SGPG_EXACT_HPP_
#define SGPG_EXACT_HPP_

#include <optional>
#include <string>

#include "sgpg/game.hpp"

namespace sgpg {

// Exact values and advantages of a profile. Q and Adv are indexed
// [player](state, joint action); Qbar and AdvBar over the player's own
// actions, averaged against the opponents' rows.
struct ValueReport {
  Matrix V;                  // players x states
  Vector V_rho;              // per player, sum_s rho(s) V_{i,s}
  std::vector<Matrix> Q;
  std::vector<Matrix> Qbar;  // [player] states x A_i
  std::vector<Matrix> Adv;
  std::vector<Matrix> AdvBar;
};

struct VisitationReport {
  Vector nu;  // expected number of visits per state
  Scalar Z = 0.0;
  Vector d;   // nu / Z
};

struct GradientBundle {
  Vector v;                  // flat over (player, state, own action)
  std::optional<Matrix> J;   // Jacobian of v, filled on demand
};

enum class MismatchMethod { kEnumerate, kClosedForm };

struct MismatchBound {
  Scalar C_lower = 1.0;
  Scalar C_upper = 0.0;
  MismatchMethod method = MismatchMethod::kClosedForm;
  long long pairs_examined = 0;
};

// M(pi)[s, s'] = sum_a pi(a|s) P(s'|s, a).
Matrix transition_matrix(const GameSpec& game, const PolicyProfile& pi);

// Per player, r_bar_i(s) = sum_a pi(a|s) r_i(s, a); players x states.
Matrix expected_rewards(const GameSpec& game, const PolicyProfile& pi);

// Solves (I - M) V_i = r_bar_i for every player.
Matrix state_values(const GameSpec& game, const PolicyProfile& pi);
// V_{i,rho}(pi) for one player.
Scalar player_value(const GameSpec& game, const PolicyProfile& pi, int player);

ValueReport value_report(const GameSpec& game, const PolicyProfile& pi);

// nu = (I - M^T)^{-1} rho.
VisitationReport visitation(const GameSpec& game, const PolicyProfile& pi);

// dV_{i,rho}/dpi_i(a|s) = nu(s) Qbar_i(s, a).
GradientBundle policy_gradient(const GameSpec& game, const PolicyProfile& pi);

// Central differences of V_{i,rho} in raw coordinates. Requires every
// kappa_i > h.
Vector gradient_fd(const GameSpec& game, const PolicyProfile& pi, Scalar h = 1e-5);

// Finite-difference Jacobian of the gradient field. Interior profiles use
// central differences per coordinate. At deterministic profiles, column
// (j, s, a) holds the one-sided derivative along e_a - e_{a*} and the column
// of a* is zero, so J z is exact to O(h) for every tangent direction z.
Matrix jacobian(const GameSpec& game, const PolicyProfile& pi, Scalar h = 1e-5);

// C_upper = 1 / (zeta * min_s rho(s)) always; `kEnumerate` also computes
// C_lower as the largest visitation ratio over deterministic profile pairs
// (capped at `max_pairs`, sampled uniformly beyond the cap).
MismatchBound mismatch_coefficient(const GameSpec& game, MismatchMethod method,
                                   long long max_pairs = 10000);

// Z * E_{s~d} E_{a~pi} f(s, a) for a state x joint-action table f.
Scalar conversion_expectation(const GameSpec& game, const PolicyProfile& pi,
                              const Matrix& f);

}  // namespace sgpg

#endif  // SGPG_EXACT_HPP_
