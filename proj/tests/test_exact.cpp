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

#include <doctest.h>

#include <cmath>

#include "sgpg/exact.hpp"
#include "test_util.hpp"

using namespace sgpg;

namespace {

// Value iteration V <- rbar + M V, independent of the linear solve.
Matrix iterate_values(const GameSpec& g, const PolicyProfile& pi) {
  const Matrix M = transition_matrix(g, pi);
  const Matrix r = expected_rewards(g, pi);
  Matrix V = Matrix::Zero(r.rows(), r.cols());
  for (int k = 0; k < 4000; ++k) V = r + V * M.transpose();
  return V;
}

// Forward propagation nu = sum_t (M^T)^t rho.
Vector iterate_visits(const GameSpec& g, const PolicyProfile& pi) {
  const Matrix M = transition_matrix(g, pi);
  Vector mass = g.initial_dist;
  Vector nu = Vector::Zero(mass.size());
  for (int k = 0; k < 4000; ++k) {
    nu += mass;
    mass = M.transpose() * mass;
  }
  return nu;
}

Scalar rel_err(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("single state transition matrix is the continuation probability") {
  const GameSpec g = builtin_game("single_state", {{"zeta", "0.5"}});
  Rng rng({3, 0});
  const Matrix M = transition_matrix(g, testing::random_interior(g.shape(), rng));
  CHECK(M.rows() == 1);
  CHECK(M(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("transition rows sum to at most 1 - zeta") {
  Rng rng({4, 0});
  for (const auto& name : testing::builtin_names()) {
    const GameSpec g = builtin_game(name);
    const Matrix M = transition_matrix(g, testing::random_interior(g.shape(), rng));
    CHECK(M.rowwise().sum().maxCoeff() <= 1.0 - g.zeta_min + 1e-12);
  }
}

TEST_CASE("handoff2 at both-play-0") {
  const GameSpec g = builtin_game("handoff2");
  const PolicyProfile pi = PolicyProfile::deterministic(g.shape(), {{0, 0}, {0, 0}});
  const Matrix M = transition_matrix(g, pi);
  CHECK(M(0, 1) == 0.5);
  CHECK(M(0, 0) == 0.0);
  CHECK(M(1, 0) == 0.0);
  CHECK(M(1, 1) == 0.0);

  const VisitationReport vis = visitation(g, pi);
  CHECK(vis.nu[0] == doctest::Approx(0.9));
  CHECK(vis.nu[1] == doctest::Approx(0.55));
  CHECK(vis.Z == doctest::Approx(1.45));

  // Nearly all initial mass on s0 reproduces the one-step chain nu = (1, 0.5).
  const GameSpec g1 = builtin_game("handoff2", {{"rho0", "0.999999"}});
  const VisitationReport v1 = visitation(g1, pi);
  CHECK(v1.nu[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(v1.nu[1] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(v1.Z == doctest::Approx(1.5).epsilon(1e-5));
}

TEST_CASE("coord2 values at both-play-0") {
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile pi = PolicyProfile::deterministic(g.shape(), {{0}, {0}});
  const ValueReport rep = value_report(g, pi);
  for (int i = 0; i < 2; ++i) {
    CHECK(rep.V(i, 0) == doctest::Approx(2.0));
    CHECK(rep.V_rho[i] == doctest::Approx(2.0));
    CHECK(rep.Qbar[i](0, 0) == doctest::Approx(2.0));
    CHECK(rep.Qbar[i](0, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("pennies2 at uniform has zero values and zero gradient") {
  const GameSpec g = builtin_game("pennies2");
  const PolicyProfile u = PolicyProfile::uniform(g.shape());
  const ValueReport rep = value_report(g, u);
  CHECK(rep.V.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(policy_gradient(g, u).v.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(gradient_fd(g, u).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("single state visitation is 1/zeta") {
  const GameSpec g = builtin_game("single_state", {{"zeta", "0.5"}, {"payoff", "pennies"}});
  Rng rng({5, 0});
  const VisitationReport vis = visitation(g, testing::random_interior(g.shape(), rng));
  CHECK(vis.nu[0] == doctest::Approx(2.0));
  CHECK(vis.Z == doctest::Approx(2.0));
  CHECK(vis.d[0] == doctest::Approx(1.0));
}

TEST_CASE("values and visits agree with fixed-point iteration") {
  Rng rng({6, 0});
  for (const auto& name : testing::builtin_names()) {
    const GameSpec g = builtin_game(name);
    for (int k = 0; k < 5; ++k) {
      const PolicyProfile pi = testing::random_interior(g.shape(), rng);
      const Matrix V = state_values(g, pi);
      CHECK((V - iterate_values(g, pi)).cwiseAbs().maxCoeff() < 1e-12);
      const VisitationReport vis = visitation(g, pi);
      CHECK((vis.nu - iterate_visits(g, pi)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(vis.d.sum() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(vis.Z <= 1.0 / g.zeta_min + 1e-12);
      CHECK((vis.nu.array() >= g.initial_dist.array() - 1e-15).all());
      CHECK(V.cwiseAbs().maxCoeff() <= 1.0 / g.zeta_min + 1e-12);
    }
  }
}

TEST_CASE("Bellman consistency and zero mean advantages") {
  Rng rng({7, 0});
  const GameSpec g = builtin_game("random", {{"seed", "3"}, {"states", "3"}, {"actions", "2x3"}});
  const GameShape shape = g.shape();
  const PolicyProfile pi = testing::random_interior(shape, rng);
  const ValueReport rep = value_report(g, pi);
  for (int i = 0; i < shape.num_players(); ++i) {
    for (int s = 0; s < shape.num_states(); ++s) {
      for (int a = 0; a < shape.num_joint_actions(); ++a) {
        const Scalar q = g.rewards[i](s, a) + g.transitions[s].row(a).dot(rep.V.row(i));
        CHECK(rep.Q[i](s, a) == doctest::Approx(q).epsilon(1e-12));
      }
      CHECK(std::abs(pi.block(i, s).dot(rep.AdvBar[i].row(s).transpose())) < 1e-10);
      CHECK(pi.joint_probs(s).dot(rep.Q[i].row(s).transpose()) ==
            doctest::Approx(rep.V(i, s)).epsilon(1e-12));
    }
    CHECK(rep.V_rho[i] == doctest::Approx(player_value(g, pi, i)).epsilon(1e-12));
  }
}

TEST_CASE("coord2 gradient at both-play-0") {
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile pi = PolicyProfile::deterministic(g.shape(), {{0}, {0}});
  const Vector v = policy_gradient(g, pi).v;
  CHECK(v[0] == doctest::Approx(4.0));
  CHECK(v[1] == doctest::Approx(0.0));
  CHECK(v[2] == doctest::Approx(4.0));
  CHECK(v[3] == doctest::Approx(0.0));
}

TEST_CASE("gradient matches central differences on interior profiles") {
  Rng rng({8, 0});
  for (const auto& name : testing::builtin_names()) {
    const GameSpec g = builtin_game(name);
    for (int k = 0; k < 10; ++k) {
      const PolicyProfile pi = testing::random_interior(g.shape(), rng);
      CHECK(rel_err(policy_gradient(g, pi).v, gradient_fd(g, pi)) <= 1e-6);
    }
  }
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile pi = testing::mixed(g.shape(), {{0.9, 0.1}, {0.9, 0.1}});
  CHECK(rel_err(policy_gradient(g, pi).v, gradient_fd(g, pi)) <= 1e-6);
}

TEST_CASE("gradient_fd rejects bad steps and boundary profiles") {
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile u = PolicyProfile::uniform(g.shape());
  CHECK_THROWS_WITH_AS(gradient_fd(g, u, 0.0), doctest::Contains("BOUNDARY_POLICY"), Error);
  const PolicyProfile d = PolicyProfile::deterministic(g.shape(), {{0}, {1}});
  CHECK_THROWS_WITH_AS(gradient_fd(g, d), doctest::Contains("BOUNDARY_POLICY"), Error);
}

TEST_CASE("zero-reward games have a zero Jacobian") {
  const GameSpec g = builtin_game("single_state", {{"payoff", "zero"}});
  Rng rng({9, 0});
  CHECK(jacobian(g, testing::random_interior(g.shape(), rng)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pennies2 Jacobian at uniform is antisymmetric across players") {
  const GameSpec g = builtin_game("pennies2");
  const Matrix J = jacobian(g, PolicyProfile::uniform(g.shape()));
  CHECK(J.block(0, 0, 2, 2).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(J.block(2, 2, 2, 2).cwiseAbs().maxCoeff() < 1e-5);
  const Matrix J12 = J.block(0, 2, 2, 2);
  const Matrix J21 = J.block(2, 0, 2, 2);
  CHECK((J12 + J21.transpose()).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(J12.cwiseAbs().maxCoeff() > 1.0);
}

TEST_CASE("Jacobian differences shrink fourfold when the step halves") {
  const GameSpec g = builtin_game("random", {{"seed", "11"}, {"states", "3"}, {"actions", "2x2"}});
  const PolicyProfile pi = testing::mixed(
      g.shape(), {{0.3, 0.7}, {0.6, 0.4}, {0.5, 0.5}, {0.45, 0.55}, {0.35, 0.65}, {0.7, 0.3}});
  const Matrix J1 = jacobian(g, pi, 0.04);
  const Matrix J2 = jacobian(g, pi, 0.02);
  const Matrix J3 = jacobian(g, pi, 0.01);
  const Scalar ratio = (J1 - J2).norm() / (J2 - J3).norm();
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("vertex Jacobian reproduces tangent directional derivatives") {
  const GameSpec g = builtin_game("handoff2");
  const GameShape shape = g.shape();
  const PolicyProfile star = PolicyProfile::deterministic(shape, {{0, 1}, {0, 1}});
  const Matrix J = jacobian(g, star);
  const Vector v0 = policy_gradient(g, star).v;
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 2; ++s) {
      const int star_a = star.pure_choices()[i][s];
      Vector z = Vector::Zero(shape.dim());
      z[shape.index(i, s, 1 - star_a)] = 1.0;
      z[shape.index(i, s, star_a)] = -1.0;
      const Scalar t = 1e-6;
      const Vector dv = (policy_gradient(g, PolicyProfile(shape, star.flat() + t * z)).v - v0) / t;
      CHECK(((J * z) - dv).cwiseAbs().maxCoeff() < 1e-4);
    }
  }
}

TEST_CASE("jacobian rejects boundary profiles that are not vertices") {
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile pi = testing::mixed(g.shape(), {{1.0, 0.0}, {0.5, 0.5}});
  CHECK_THROWS_WITH_AS(jacobian(g, pi), doctest::Contains("BOUNDARY_POLICY"), Error);
}

TEST_CASE("mismatch coefficient bounds") {
  const GameSpec ss = builtin_game("single_state", {{"zeta", "0.5"}});
  const MismatchBound b = mismatch_coefficient(ss, MismatchMethod::kEnumerate);
  CHECK(b.C_lower == doctest::Approx(1.0));
  CHECK(b.C_upper == doctest::Approx(2.0));
  CHECK(mismatch_coefficient(ss, MismatchMethod::kClosedForm).pairs_examined == 0);

  const GameSpec h = builtin_game("handoff2");
  const MismatchBound hb = mismatch_coefficient(h, MismatchMethod::kEnumerate);
  CHECK(hb.pairs_examined == 256);
  CHECK(hb.C_lower > 1.0);
  CHECK(hb.C_lower <= hb.C_upper);

  const GameSpec r = builtin_game("random", {{"seed", "2"}, {"states", "4"}, {"actions", "3x3"}});
  const MismatchBound rb = mismatch_coefficient(r, MismatchMethod::kEnumerate, 500);
  CHECK(rb.pairs_examined == 500);
  CHECK(rb.C_lower <= rb.C_upper);
}

TEST_CASE("conversion expectation special cases") {
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile u = PolicyProfile::uniform(g.shape());
  const Matrix ones = Matrix::Ones(1, 4);
  CHECK(conversion_expectation(g, u, ones) == doctest::Approx(visitation(g, u).Z));
  Matrix same(1, 4);
  same << 1, 0, 0, 1;
  CHECK(conversion_expectation(g, u, same) == doctest::Approx(1.0));

  Rng rng({10, 0});
  const GameSpec h = builtin_game("handoff2");
  const PolicyProfile pi = testing::random_interior(h.shape(), rng);
  for (int i = 0; i < 2; ++i) {
    CHECK(conversion_expectation(h, pi, h.rewards[i]) ==
          doctest::Approx(player_value(h, pi, i)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(conversion_expectation(h, pi, Matrix::Ones(1, 4)), Error);
}

}  // TEST_SUITE
