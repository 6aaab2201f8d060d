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

#include "sgpg/exact.hpp"

#include <cmath>

#include <Eigen/LU>

#include "sgpg/random.hpp"

namespace sgpg {

namespace {

void check_shapes(const GameSpec& game, const PolicyProfile& pi) {
  if (!(pi.shape() == game.shape())) {
    throw Error(ErrorCode::kDimensionMismatch, "policy shape does not match the game");
  }
}

Eigen::PartialPivLU<Matrix> factor(const Matrix& A) {
  Eigen::PartialPivLU<Matrix> lu(A);
  const Scalar rcond = lu.rcond();
  if (!std::isfinite(rcond) || rcond < 1e-14) {
    throw Error(ErrorCode::kSingularSystem,
                "I - M(pi) is numerically singular (rcond " + std::to_string(rcond) + ")");
  }
  return lu;
}

// Averages a joint-action row of Q against pi_{-i}(.|s) for each own action.
Vector average_over_opponents(const GameShape& shape, const PolicyProfile& pi,
                              int player, int state, const Eigen::Ref<const Vector>& q) {
  Vector out = Vector::Zero(shape.num_actions(player));
  for (int a = 0; a < shape.num_joint_actions(); ++a) {
    Scalar w = 1.0;
    for (int j = 0; j < shape.num_players(); ++j) {
      if (j != player) w *= pi.prob(j, state, shape.action_of(a, j));
    }
    out[shape.action_of(a, player)] += w * q[a];
  }
  return out;
}

// Decodes a deterministic profile from a mixed-radix index over (i, s).
PolicyProfile deterministic_from_index(const GameShape& shape, long long index) {
  std::vector<std::vector<int>> choices(shape.num_players(),
                                        std::vector<int>(shape.num_states()));
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int s = 0; s < shape.num_states(); ++s) {
      choices[i][s] = static_cast<int>(index % shape.num_actions(i));
      index /= shape.num_actions(i);
    }
  }
  return PolicyProfile::deterministic(shape, choices);
}

}  // namespace

Matrix transition_matrix(const GameSpec& game, const PolicyProfile& pi) {
  check_shapes(game, pi);
  const int S = game.num_states();
  Matrix M(S, S);
  for (int s = 0; s < S; ++s) {
    M.row(s) = pi.joint_probs(s).transpose() * game.transitions[s];
  }
  return M;
}

Matrix expected_rewards(const GameSpec& game, const PolicyProfile& pi) {
  check_shapes(game, pi);
  const int S = game.num_states();
  Matrix rbar(game.num_players(), S);
  for (int s = 0; s < S; ++s) {
    const Vector probs = pi.joint_probs(s);
    for (int i = 0; i < game.num_players(); ++i) {
      rbar(i, s) = game.rewards[i].row(s).dot(probs);
    }
  }
  return rbar;
}

Matrix state_values(const GameSpec& game, const PolicyProfile& pi) {
  const Matrix M = transition_matrix(game, pi);
  const auto lu = factor(Matrix::Identity(M.rows(), M.cols()) - M);
  const Matrix rbar = expected_rewards(game, pi);
  return lu.solve(rbar.transpose()).transpose();
}

Scalar player_value(const GameSpec& game, const PolicyProfile& pi, int player) {
  return state_values(game, pi).row(player).dot(game.initial_dist);
}

ValueReport value_report(const GameSpec& game, const PolicyProfile& pi) {
  const GameShape shape = game.shape();
  const int S = game.num_states();
  const int n = game.num_players();
  ValueReport report;
  report.V = state_values(game, pi);
  report.V_rho = report.V * game.initial_dist;
  for (int i = 0; i < n; ++i) {
    Matrix Q(S, shape.num_joint_actions());
    for (int s = 0; s < S; ++s) {
      Q.row(s) = game.rewards[i].row(s) +
                 (game.transitions[s] * report.V.row(i).transpose()).transpose();
    }
    Matrix Qbar(S, shape.num_actions(i));
    for (int s = 0; s < S; ++s) {
      Qbar.row(s) = average_over_opponents(shape, pi, i, s, Q.row(s).transpose()).transpose();
    }
    Matrix Adv = Q.colwise() - report.V.row(i).transpose();
    Matrix AdvBar = Qbar.colwise() - report.V.row(i).transpose();
    report.Q.push_back(std::move(Q));
    report.Qbar.push_back(std::move(Qbar));
    report.Adv.push_back(std::move(Adv));
    report.AdvBar.push_back(std::move(AdvBar));
  }
  return report;
}

VisitationReport visitation(const GameSpec& game, const PolicyProfile& pi) {
  const Matrix M = transition_matrix(game, pi);
  const auto lu = factor(Matrix::Identity(M.rows(), M.cols()) - M.transpose());
  VisitationReport report;
  report.nu = lu.solve(game.initial_dist);
  report.Z = report.nu.sum();
  report.d = report.nu / report.Z;
  return report;
}

GradientBundle policy_gradient(const GameSpec& game, const PolicyProfile& pi) {
  const GameShape shape = game.shape();
  const Matrix M = transition_matrix(game, pi);
  const Matrix I = Matrix::Identity(M.rows(), M.cols());
  const Matrix V = factor(I - M).solve(expected_rewards(game, pi).transpose()).transpose();
  const Vector nu = factor(I - M.transpose()).solve(game.initial_dist);

  GradientBundle out;
  out.v.resize(shape.dim());
  for (int s = 0; s < game.num_states(); ++s) {
    const Matrix Q = (game.transitions[s] * V.transpose()).transpose();  // n x |A|
    for (int i = 0; i < game.num_players(); ++i) {
      const Vector q = game.rewards[i].row(s).transpose() + Q.row(i).transpose();
      out.v.segment(shape.block_offset(i, s), shape.num_actions(i)) =
          nu[s] * average_over_opponents(shape, pi, i, s, q);
    }
  }
  return out;
}

Vector gradient_fd(const GameSpec& game, const PolicyProfile& pi, Scalar h) {
  check_shapes(game, pi);
  if (!(h > 0.0) || !(pi.min_prob() > h)) {
    throw Error(ErrorCode::kBoundaryPolicy,
                "central differences need h > 0 and every probability > h");
  }
  const GameShape& shape = pi.shape();
  Vector grad(shape.dim());
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int k = shape.player_offset(i); k < shape.player_offset(i) + shape.player_dim(i); ++k) {
      PolicyProfile plus = pi, minus = pi;
      plus.flat()[k] += h;
      minus.flat()[k] -= h;
      grad[k] = (player_value(game, plus, i) - player_value(game, minus, i)) / (2.0 * h);
    }
  }
  return grad;
}

Matrix jacobian(const GameSpec& game, const PolicyProfile& pi, Scalar h) {
  check_shapes(game, pi);
  if (!(h > 0.0)) throw Error(ErrorCode::kBoundaryPolicy, "step must be positive");
  const GameShape& shape = pi.shape();
  const int dim = shape.dim();
  Matrix J = Matrix::Zero(dim, dim);
  if (pi.min_prob() > h) {
    for (int k = 0; k < dim; ++k) {
      PolicyProfile plus = pi, minus = pi;
      plus.flat()[k] += h;
      minus.flat()[k] -= h;
      J.col(k) = (policy_gradient(game, plus).v - policy_gradient(game, minus).v) / (2.0 * h);
    }
    return J;
  }
  if (!pi.is_deterministic()) {
    throw Error(ErrorCode::kBoundaryPolicy,
                "Jacobian needs an interior or a deterministic profile");
  }
  const Vector v0 = policy_gradient(game, pi).v;
  const auto choices = pi.pure_choices();
  for (int j = 0; j < shape.num_players(); ++j) {
    for (int s = 0; s < shape.num_states(); ++s) {
      const int star = shape.index(j, s, choices[j][s]);
      for (int a = 0; a < shape.num_actions(j); ++a) {
        const int k = shape.index(j, s, a);
        if (k == star) continue;
        PolicyProfile one = pi, two = pi;
        one.flat()[k] += h;
        one.flat()[star] -= h;
        two.flat()[k] += 2.0 * h;
        two.flat()[star] -= 2.0 * h;
        // Second-order one-sided difference along e_a - e_{a*}.
        J.col(k) = (-3.0 * v0 + 4.0 * policy_gradient(game, one).v -
                    policy_gradient(game, two).v) / (2.0 * h);
      }
    }
  }
  return J;
}

MismatchBound mismatch_coefficient(const GameSpec& game, MismatchMethod method,
                                   long long max_pairs) {
  MismatchBound bound;
  bound.method = method;
  bound.C_upper = 1.0 / (game.zeta_min * game.initial_dist.minCoeff());
  if (method == MismatchMethod::kClosedForm) return bound;

  const GameShape shape = game.shape();
  double profiles = 1.0;
  for (int i = 0; i < shape.num_players(); ++i) {
    profiles *= std::pow(static_cast<double>(shape.num_actions(i)), shape.num_states());
  }
  auto ratio = [](const Vector& num, const Vector& den) {
    return (num.array() / den.array()).maxCoeff();
  };
  Scalar best = 1.0;
  if (profiles * profiles <= static_cast<double>(max_pairs)) {
    const auto count = static_cast<long long>(profiles);
    std::vector<Vector> nus;
    nus.reserve(count);
    for (long long k = 0; k < count; ++k) {
      nus.push_back(visitation(game, deterministic_from_index(shape, k)).nu);
    }
    for (long long a = 0; a < count; ++a) {
      for (long long b = 0; b < count; ++b) {
        best = std::max(best, ratio(nus[a], nus[b]));
        ++bound.pairs_examined;
      }
    }
  } else {
    Rng rng(RngState{0x6d69736d61746368ULL, 0});
    auto draw = [&]() {
      std::vector<std::vector<int>> choices(shape.num_players(),
                                            std::vector<int>(shape.num_states()));
      for (int i = 0; i < shape.num_players(); ++i) {
        for (int s = 0; s < shape.num_states(); ++s) {
          choices[i][s] = std::min(shape.num_actions(i) - 1,
                                   static_cast<int>(rng.uniform() * shape.num_actions(i)));
        }
      }
      return visitation(game, PolicyProfile::deterministic(shape, choices)).nu;
    };
    for (long long k = 0; k < max_pairs; ++k) {
      best = std::max(best, ratio(draw(), draw()));
      ++bound.pairs_examined;
    }
  }
  bound.C_lower = best;
  return bound;
}

Scalar conversion_expectation(const GameSpec& game, const PolicyProfile& pi,
                              const Matrix& f) {
  const GameShape shape = game.shape();
  if (f.rows() != game.num_states() || f.cols() != shape.num_joint_actions()) {
    throw Error(ErrorCode::kDimensionMismatch, "f must be |S| x |A|");
  }
  const Vector nu = visitation(game, pi).nu;
  Scalar total = 0.0;
  for (int s = 0; s < game.num_states(); ++s) {
    total += nu[s] * f.row(s).dot(pi.joint_probs(s));
  }
  return total;
}

}  // namespace sgpg
