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

#include "sgpg/exact.hpp"
#include "sgpg/geometry.hpp"
#include "test_util.hpp"

using namespace sgpg;

namespace {

// Projection by bisection on the threshold tau with sum max(y - tau, 0) = 1.
Vector bisect_projection(const Vector& y) {
  Scalar lo = y.minCoeff() - 1.0;
  Scalar hi = y.maxCoeff();
  for (int k = 0; k < 200; ++k) {
    const Scalar mid = 0.5 * (lo + hi);
    if ((y.array() - mid).max(0.0).sum() > 1.0) lo = mid;
    else hi = mid;
  }
  return (y.array() - 0.5 * (lo + hi)).max(0.0).matrix();
}

Vector vec(std::initializer_list<Scalar> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (Scalar x : xs) v[k++] = x;
  return v;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("points of the simplex project to themselves") {
  const Vector y = vec({0.2, 0.5, 0.3});
  const auto cert = project_simplex(y);
  CHECK((cert.x - y).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(cert.nu.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("symmetric input projects to the barycenter") {
  const auto cert = project_simplex(vec({0.8, 0.8}));
  CHECK(cert.x[0] == doctest::Approx(0.5));
  CHECK(cert.x[1] == doctest::Approx(0.5));
}

TEST_CASE("clipped input lands on a vertex with a valid certificate") {
  const Vector y = vec({1.2, -0.3});
  const auto cert = project_simplex(y);
  CHECK(cert.x[0] == 1.0);
  CHECK(cert.x[1] == 0.0);
  // y = x + mu - nu componentwise: 1.2 = 1 + mu and -0.3 = 0 + mu - nu_2.
  CHECK(cert.mu == doctest::Approx(0.2));
  CHECK(cert.nu[0] == doctest::Approx(0.0));
  CHECK(cert.nu[1] == doctest::Approx(0.5));
  CHECK(certificate_violation(y, cert) < 1e-15);
}

TEST_CASE("sort-and-threshold agrees with bisection") {
  Rng rng({21, 0});
  for (int k = 0; k < 500; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform() * 7);
    Vector y(n);
    for (int a = 0; a < n; ++a) y[a] = rng.uniform(-3.0, 3.0);
    const auto cert = project_simplex(y);
    CHECK((cert.x - bisect_projection(y)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(certificate_violation(y, cert) < 1e-12);
  }
}

TEST_CASE("projection is generic over scalar type and expressions") {
  Eigen::VectorXf y(3);
  y << 2.0f, 0.0f, 0.0f;
  const auto cert = project_simplex(y * 0.5f);
  CHECK(cert.x[0] == 1.0f);
  CHECK(cert.x.sum() == 1.0f);
  const Eigen::Vector3d fixed(0.1, 0.1, 0.1);
  const auto c2 = project_simplex(fixed);
  CHECK(c2.x[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("non-finite projection input is rejected") {
  CHECK_THROWS_AS(project_simplex(vec({1.0, std::numeric_limits<Scalar>::quiet_NaN()})), Error);
}

TEST_CASE("project_policy identity, zeros and vertices") {
  const GameShape shape(2, {2, 3});
  Rng rng({22, 0});
  const PolicyProfile pi = testing::random_interior(shape, rng);
  CHECK((project_policy(pi.flat(), shape).flat() - pi.flat()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(project_policy(Vector::Zero(shape.dim()), shape).flat().isApprox(
      PolicyProfile::uniform(shape).flat()));

  const GameShape c2(1, {2, 2});
  const PolicyProfile d = project_policy(vec({1.2, -0.3, 1.2, -0.3}), c2);
  CHECK(d == PolicyProfile::deterministic(c2, {{0}, {0}}));
  CHECK(projection_certificate_violation(vec({1.2, -0.3, 1.2, -0.3}), c2) < 1e-15);
}

TEST_CASE("projection is idempotent and nonexpansive") {
  const GameShape shape(2, {3, 2});
  Rng rng({23, 0});
  for (int k = 0; k < 200; ++k) {
    Vector a(shape.dim()), b(shape.dim());
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      a[j] = rng.uniform(-2.0, 2.0);
      b[j] = rng.uniform(-2.0, 2.0);
    }
    const Vector pa = project_policy(a, shape).flat();
    const Vector pb = project_policy(b, shape).flat();
    CHECK((project_policy(pa, shape).flat() - pa).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((pa - pb).norm() <= (a - b).norm() + 1e-12);
  }
}

TEST_CASE("lazy basin scores project onto the target") {
  const GameShape shape(2, {2, 3});
  const PolicyProfile target = PolicyProfile::deterministic(shape, {{1, 0}, {2, 1}});
  const LazyScores scores = lazy_basin_scores(target, 1.0);
  CHECK(project_policy(scores) == target);
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 2; ++s) {
      const int star = target.pure_choices()[i][s];
      for (int a = 0; a < shape.num_actions(i); ++a) {
        if (a != star) {
          CHECK(scores.y[shape.index(i, s, a)] - scores.y[shape.index(i, s, star)] <= -1.0);
        }
      }
    }
  }
  CHECK_THROWS_AS(lazy_basin_scores(PolicyProfile::uniform(shape)), Error);
}

TEST_CASE("fos residual examples") {
  const GameSpec pennies = builtin_game("pennies2");
  CHECK(fos_residual(pennies, PolicyProfile::uniform(pennies.shape())) <= 1e-10);

  const GameSpec coord = builtin_game("coord2");
  const PolicyProfile star = PolicyProfile::deterministic(coord.shape(), {{0}, {0}});
  CHECK(fos_residual(coord, star) == doctest::Approx(0.0));

  const PolicyProfile off = testing::mixed(coord.shape(), {{0.75, 0.25}, {0.5, 0.5}});
  const Vector v = policy_gradient(coord, off).v;
  CHECK(v[2] == doctest::Approx(1.0));
  CHECK(v[3] == doctest::Approx(-1.0));
  CHECK(fos_residual(v, off, 1) == doctest::Approx(1.0));
  CHECK(fos_residual(v, off, 0) == doctest::Approx(0.0));
  CHECK(fos_residual(coord, off) == doctest::Approx(1.0));
}

TEST_CASE("sos certificate on definite and zero forms") {
  const GameShape shape(1, {2, 2});
  const PolicyProfile star = PolicyProfile::deterministic(shape, {{0}, {1}});
  const Matrix I = Matrix::Identity(shape.dim(), shape.dim());
  const SosCertificate neg = sos_certificate(-I, star);
  CHECK(neg.max_quad == doctest::Approx(-1.0));
  CHECK(neg.mu_hat == doctest::Approx(1.0));
  CHECK(neg.directions > 2);
  const SosCertificate zero = sos_certificate(Matrix::Zero(shape.dim(), shape.dim()), star);
  CHECK(zero.max_quad == doctest::Approx(0.0));
  CHECK(zero.mu_hat == 0.0);
}

TEST_CASE("coord2 vertex: single deviations are flat, joint deviations curve upward") {
  const GameSpec g = builtin_game("coord2");
  const PolicyProfile star = PolicyProfile::deterministic(g.shape(), {{0}, {0}});
  const Matrix J = jacobian(g, star);
  Vector single = Vector::Zero(4);
  single << -1, 1, 0, 0;
  single.normalize();
  CHECK(std::abs(single.dot(J * single)) < 1e-6);
  Vector joint = Vector::Zero(4);
  joint << -1, 1, -1, 1;
  joint.normalize();
  CHECK(joint.dot(J * joint) == doctest::Approx(4.0).epsilon(1e-4));
  const SosCertificate cert = sos_certificate(J, star);
  CHECK(cert.max_quad > 0.0);
  CHECK(cert.mu_hat == 0.0);
}

}  // TEST_SUITE
