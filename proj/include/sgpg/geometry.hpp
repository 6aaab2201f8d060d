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

#ifndef SGPG_GEOMETRY_HPP_
#define SGPG_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sgpg/game.hpp"

namespace sgpg {

// KKT multipliers of the simplex projection: y_a = x_a + mu - nu_a with
// nu_a >= 0 and x_a nu_a = 0.
template <typename Scalar_>
struct ProjectionCertificate {
  using VectorType = Eigen::Matrix<Scalar_, Eigen::Dynamic, 1>;
  VectorType x;
  Scalar_ mu = 0;
  VectorType nu;
};

// Largest violation of the KKT identities for input y.
template <typename Derived, typename Scalar_ = typename Derived::Scalar>
Scalar_ certificate_violation(const Eigen::MatrixBase<Derived>& y,
                              const ProjectionCertificate<Scalar_>& cert) {
  using std::abs;
  using std::max;
  Scalar_ worst = abs(cert.x.sum() - Scalar_(1));
  for (Eigen::Index a = 0; a < y.size(); ++a) {
    worst = max(worst, abs(y[a] - (cert.x[a] + cert.mu - cert.nu[a])));
    worst = max(worst, max(-cert.nu[a], -cert.x[a]));
    worst = max(worst, abs(cert.x[a] * cert.nu[a]));
  }
  return worst;
}

// Euclidean projection onto the probability simplex by sort-and-threshold.
// Returns the projected point with its KKT certificate.
template <typename Derived>
ProjectionCertificate<typename Derived::Scalar> project_simplex(
    const Eigen::MatrixBase<Derived>& y) {
  using S = typename Derived::Scalar;
  using VectorType = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  const Eigen::Index k = y.size();
  if (k < 1 || !y.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "projection input must be finite and non-empty");
  }
  std::vector<S> sorted;
  sorted.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) sorted.push_back(y[a]);
  std::sort(sorted.begin(), sorted.end(), std::greater<S>());

  // Largest rho with sorted[rho] - (sum_{j<=rho} sorted[j] - 1) / (rho + 1) > 0.
  S cumulative = 0, threshold = 0;
  for (Eigen::Index r = 0; r < k; ++r) {
    cumulative += sorted[static_cast<std::size_t>(r)];
    const S candidate = (cumulative - S(1)) / static_cast<S>(r + 1);
    if (sorted[static_cast<std::size_t>(r)] - candidate > S(0)) threshold = candidate;
  }
  ProjectionCertificate<S> cert;
  cert.x = (y.array() - threshold).max(S(0)).matrix();
  cert.mu = threshold;
  cert.nu = VectorType::Zero(k);
  Eigen::Index support = 0, top = 0;
  for (Eigen::Index a = 0; a < k; ++a) {
    if (cert.x[a] > S(0)) {
      ++support;
      top = a;
    }
  }
  // A single surviving coordinate is an exact vertex.
  if (support == 1) {
    cert.x[top] = S(1);
    cert.mu = y[top] - S(1);
  }
  for (Eigen::Index a = 0; a < k; ++a) {
    if (cert.x[a] == S(0)) cert.nu[a] = cert.mu - y[a];
  }
  return cert;
}

// Aggregated gradient steps y_n of the lazy scheme; the induced policy is
// project_policy(y).
struct LazyScores {
  GameShape shape;
  Vector y;
};

// Blockwise simplex projection over (player, state) rows. Blocks are
// orthogonal, so this is the Euclidean projection onto the product space.
PolicyProfile project_policy(const Vector& y, const GameShape& shape);
inline PolicyProfile project_policy(const LazyScores& scores) {
  return project_policy(scores.y, scores.shape);
}

// Worst KKT violation over all blocks of project_policy(y).
Scalar projection_certificate_violation(const Vector& y, const GameShape& shape);

// Lazy-score initialization whose projection is the deterministic target:
// y_{a*} = 0 and y_a = -margin in every block.
LazyScores lazy_basin_scores(const PolicyProfile& target, Scalar margin = 1.0);

// R(pi) = max_{pi'} <v(pi), pi' - pi>, closed form per block.
Scalar fos_residual(const GameSpec& game, const PolicyProfile& pi);
// Same from a precomputed gradient; optionally restricted to one player.
Scalar fos_residual(const Vector& v, const PolicyProfile& pi, int player = -1);

struct SosCertificate {
  Scalar max_quad = 0.0;
  Scalar mu_hat = 0.0;  // -max_quad when negative, else 0
  int directions = 0;
};

// Evaluates z' J z over unit tangent directions at pi_star: every normalized
// vertex difference e_a - e_b (b in the support) plus `n_dirs` random
// nonnegative combinations of them. Negative max_quad supports the
// second-order condition; nonnegative refutes it.
SosCertificate sos_certificate(const Matrix& J, const PolicyProfile& pi_star,
                               int n_dirs = 512, std::uint64_t seed = 0x736f73);

}  // namespace sgpg

#endif  // SGPG_GEOMETRY_HPP_
