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

#include "sgpg/geometry.hpp"

#include "sgpg/exact.hpp"
#include "sgpg/random.hpp"

namespace sgpg {

PolicyProfile project_policy(const Vector& y, const GameShape& shape) {
  if (y.size() != shape.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "score vector does not match the game shape");
  }
  Vector x(shape.dim());
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int s = 0; s < shape.num_states(); ++s) {
      const int offset = shape.block_offset(i, s);
      const int k = shape.num_actions(i);
      x.segment(offset, k) = project_simplex(y.segment(offset, k)).x;
    }
  }
  return PolicyProfile(shape, std::move(x));
}

Scalar projection_certificate_violation(const Vector& y, const GameShape& shape) {
  Scalar worst = 0.0;
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int s = 0; s < shape.num_states(); ++s) {
      const auto block = y.segment(shape.block_offset(i, s), shape.num_actions(i));
      worst = std::max(worst, certificate_violation(block, project_simplex(block)));
    }
  }
  return worst;
}

LazyScores lazy_basin_scores(const PolicyProfile& target, Scalar margin) {
  if (!(margin > 0.0)) throw Error(ErrorCode::kBadParams, "lazy margin must be positive");
  const auto choices = target.pure_choices();
  const GameShape& shape = target.shape();
  LazyScores scores{shape, Vector::Constant(shape.dim(), -margin)};
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int s = 0; s < shape.num_states(); ++s) {
      scores.y[shape.index(i, s, choices[i][s])] = 0.0;
    }
  }
  return scores;
}

Scalar fos_residual(const Vector& v, const PolicyProfile& pi, int player) {
  const GameShape& shape = pi.shape();
  if (v.size() != shape.dim()) throw Error(ErrorCode::kDimensionMismatch, "gradient size");
  Scalar total = 0.0;
  for (int i = 0; i < shape.num_players(); ++i) {
    if (player >= 0 && i != player) continue;
    for (int s = 0; s < shape.num_states(); ++s) {
      const auto vb = v.segment(shape.block_offset(i, s), shape.num_actions(i));
      total += vb.maxCoeff() - vb.dot(pi.block(i, s));
    }
  }
  return total;
}

Scalar fos_residual(const GameSpec& game, const PolicyProfile& pi) {
  return fos_residual(policy_gradient(game, pi).v, pi);
}

SosCertificate sos_certificate(const Matrix& J, const PolicyProfile& pi_star, int n_dirs,
                               std::uint64_t seed) {
  const GameShape& shape = pi_star.shape();
  if (J.rows() != shape.dim() || J.cols() != shape.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "Jacobian does not match the profile");
  }
  std::vector<Vector> base;
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int s = 0; s < shape.num_states(); ++s) {
      const int k = shape.num_actions(i);
      for (int b = 0; b < k; ++b) {
        if (!(pi_star.prob(i, s, b) > 0.0)) continue;
        for (int a = 0; a < k; ++a) {
          if (a == b) continue;
          Vector z = Vector::Zero(shape.dim());
          z[shape.index(i, s, a)] = 1.0;
          z[shape.index(i, s, b)] = -1.0;
          base.push_back(z / std::sqrt(2.0));
        }
      }
    }
  }
  SosCertificate cert;
  if (base.empty()) return cert;  // single-action game: no tangent directions
  cert.max_quad = -std::numeric_limits<Scalar>::infinity();
  auto evaluate = [&](const Vector& z) {
    cert.max_quad = std::max(cert.max_quad, z.dot(J * z));
    ++cert.directions;
  };
  for (const auto& z : base) evaluate(z);
  Rng rng(RngState{seed, 0});
  for (int k = 0; k < n_dirs; ++k) {
    Vector z = Vector::Zero(shape.dim());
    for (const auto& d : base) {
      if (rng.uniform() < 0.5) z += rng.exponential() * d;
    }
    const Scalar norm = z.norm();
    if (norm > 0.0) evaluate(z / norm);
  }
  cert.mu_hat = cert.max_quad < 0.0 ? -cert.max_quad : 0.0;
  return cert;
}

}  // namespace sgpg
