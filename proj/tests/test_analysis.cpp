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

#include <algorithm>
#include <cmath>

#include "sgpg/analysis.hpp"
#include "sgpg/exact.hpp"
#include "test_util.hpp"

using namespace sgpg;

namespace {

std::vector<PolicyProfile> all_deterministic(const GameShape& shape) {
  std::vector<PolicyProfile> out;
  const int n = shape.num_players();
  const int S = shape.num_states();
  std::vector<int> digits(static_cast<std::size_t>(n * S), 0);
  while (true) {
    std::vector<std::vector<int>> choices(n, std::vector<int>(S));
    for (int i = 0; i < n; ++i) {
      for (int s = 0; s < S; ++s) choices[i][s] = digits[static_cast<std::size_t>(i * S + s)];
    }
    out.push_back(PolicyProfile::deterministic(shape, choices));
    int k = n * S - 1;
    while (k >= 0) {
      auto& d = digits[static_cast<std::size_t>(k)];
      if (++d < shape.num_actions(k / S)) break;
      d = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

bool contains(const std::vector<PolicyProfile>& list, const PolicyProfile& pi) {
  return std::find(list.begin(), list.end(), pi) != list.end();
}

RunLog synthetic_log(const std::vector<Scalar>& dist_sq) {
  RunLog log;
  for (std::size_t k = 0; k < dist_sq.size(); ++k) {
    RunRecord r;
    r.n = static_cast<long long>(k + 1);
    r.dist_sq = dist_sq[k];
    log.records.push_back(r);
  }
  return log;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("coord2 vertex is strict with gaps 4") {
  const GameSpec g = builtin_game("coord2");
  const EquilibriumReport rep =
      classify_equilibrium(g, PolicyProfile::deterministic(g.shape(), {{0}, {0}}));
  CHECK(rep.classification == Classification::kStrictNash);
  CHECK(rep.is_nash);
  CHECK(rep.is_deterministic);
  CHECK(rep.strict_gaps(0, 0) == doctest::Approx(4.0));
  CHECK(rep.strict_gaps(1, 0) == doctest::Approx(4.0));
  CHECK(rep.sos.has_value());
}

TEST_CASE("pennies2 uniform is Nash but not strict") {
  const GameSpec g = builtin_game("pennies2");
  const EquilibriumReport rep = classify_equilibrium(g, PolicyProfile::uniform(g.shape()));
  CHECK(rep.classification == Classification::kNash);
  CHECK_FALSE(rep.is_deterministic);
  CHECK(rep.strict_gaps.size() == 0);
  REQUIRE(rep.sos.has_value());
  CHECK(rep.sos->max_quad >= -1e-6);
}

TEST_CASE("off-equilibrium coord2 profile is not Nash") {
  const GameSpec g = builtin_game("coord2");
  const EquilibriumReport rep =
      classify_equilibrium(g, testing::mixed(g.shape(), {{0.75, 0.25}, {0.5, 0.5}}));
  CHECK(rep.classification == Classification::kNotNash);
  CHECK(rep.fos_residual == doctest::Approx(1.0));
}

TEST_CASE("brute force on coord2 and pennies2") {
  const GameSpec c = builtin_game("coord2");
  const auto nash = brute_force_deterministic_nash(c);
  REQUIRE(nash.size() == 2);
  CHECK(contains(nash, PolicyProfile::deterministic(c.shape(), {{0}, {0}})));
  CHECK(contains(nash, PolicyProfile::deterministic(c.shape(), {{1}, {1}})));
  CHECK(brute_force_deterministic_nash(builtin_game("pennies2")).empty());
}

TEST_CASE("brute force agrees with the classifier on every builtin") {
  for (const auto& name : testing::builtin_names()) {
    const GameSpec g = builtin_game(name);
    const auto nash = brute_force_deterministic_nash(g);
    for (const auto& pi : all_deterministic(g.shape())) {
      const EquilibriumReport rep = classify_equilibrium(g, pi);
      CHECK_MESSAGE(rep.is_nash == contains(nash, pi), name);
    }
  }
}

TEST_CASE("handoff2 equilibria") {
  const GameSpec g = builtin_game("handoff2");
  const GameShape shape = g.shape();
  const auto nash = brute_force_deterministic_nash(g);
  // choices[i][s]; hand enumeration: with (1,1) at s1 the handoff is worth
  // 0.2 + 0.5 = 0.7 > 0, with (0,0) at s1 it is worth 0.2 - 0.5 < 0.
  const std::vector<std::vector<std::vector<int>>> expected{
      {{0, 1}, {0, 1}}, {{1, 1}, {1, 1}}, {{1, 0}, {1, 0}}, {{0, 0}, {1, 0}}, {{1, 0}, {0, 0}}};
  CHECK(nash.size() == expected.size());
  for (const auto& choices : expected) {
    CHECK(contains(nash, PolicyProfile::deterministic(shape, choices)));
  }
  const PolicyProfile strict = PolicyProfile::deterministic(shape, {{0, 1}, {0, 1}});
  CHECK(classify_equilibrium(g, strict).classification == Classification::kStrictNash);
  int strict_count = 0;
  for (const auto& pi : nash) {
    const EquilibriumReport rep = classify_equilibrium(g, pi);
    CHECK(rep.is_nash);
    if (rep.classification == Classification::kStrictNash) ++strict_count;
  }
  CHECK(strict_count == 1);
  const EquilibriumReport weak_rep =
      classify_equilibrium(g, PolicyProfile::deterministic(shape, {{1, 1}, {1, 1}}));
  CHECK(weak_rep.strict_gaps(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("strict gaps match the gradient at strict vertices") {
  for (const auto& name : testing::builtin_names()) {
    const GameSpec g = builtin_game(name);
    const GameShape shape = g.shape();
    for (const auto& pi : brute_force_deterministic_nash(g)) {
      const EquilibriumReport rep = classify_equilibrium(g, pi);
      if (rep.classification != Classification::kStrictNash) continue;
      const Vector v = policy_gradient(g, pi).v;
      const auto choices = pi.pure_choices();
      for (int i = 0; i < shape.num_players(); ++i) {
        for (int s = 0; s < shape.num_states(); ++s) {
          Scalar worst = std::numeric_limits<Scalar>::infinity();
          for (int a = 0; a < shape.num_actions(i); ++a) {
            if (a == choices[i][s]) continue;
            Vector e = Vector::Zero(shape.dim());
            e[shape.index(i, s, a)] = 1.0;
            e[shape.index(i, s, choices[i][s])] = -1.0;
            const Scalar directional = v.dot(e);
            CHECK(directional < 0.0);
            worst = std::min(worst, -directional);
          }
          CHECK(rep.strict_gaps(i, s) == doctest::Approx(worst));
        }
      }
    }
  }
}

TEST_CASE("brute force refuses huge games") {
  const GameSpec g =
      builtin_game("random", {{"seed", "1"}, {"states", "10"}, {"actions", "3x3"}});
  CHECK_THROWS_WITH_AS(brute_force_deterministic_nash(g), doctest::Contains("TOO_LARGE"), Error);
}

TEST_CASE("rate fit recovers exact power laws") {
  std::vector<Scalar> inv(100000), inv_sqrt(100000), flat(100000, 0.3);
  for (std::size_t k = 0; k < inv.size(); ++k) {
    inv[k] = 1.0 / static_cast<Scalar>(k + 1);
    inv_sqrt[k] = 1.0 / std::sqrt(static_cast<Scalar>(k + 1));
  }
  const RateFit a = fit_rate(synthetic_log(inv), {1000, 100000});
  CHECK(a.slope == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(a.std_err < 0.01);
  CHECK(fit_rate(inv_sqrt, {10, 100000}).slope == doctest::Approx(-0.5).epsilon(0.01));
  CHECK(std::abs(fit_rate(flat, {1, 100000}).slope) < 1e-12);
  CHECK(fit_rate(inv, {1, 100000}).slope == doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("rate fit over several logs averages then excludes basin exits") {
  std::vector<Scalar> a(1000), b(1000), far(1000);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = 0.5 / (k + 1.0);
    b[k] = 0.9 / (k + 1.0);
    far[k] = k == 3 ? 4.0 : 1.0 / (k + 1.0);
  }
  const RunLog la = synthetic_log(a), lb = synthetic_log(b), lf = synthetic_log(far);
  const RateFit fit = fit_rate({&la, &lb, &lf}, {10, 1000}, 1.0);
  CHECK(fit.runs_used == 2);
  CHECK(fit.runs_excluded == 1);
  CHECK(fit.exclusion_fraction == doctest::Approx(1.0 / 3.0));
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.01));
  CHECK(fit.intercept == doctest::Approx(std::log(0.7)).epsilon(0.05));
}

TEST_CASE("rate fit input errors") {
  std::vector<Scalar> zeros(1000, 0.0);
  CHECK_THROWS_WITH_AS(fit_rate(zeros, {10, 1000}), doctest::Contains("INSUFFICIENT_DATA"), Error);
  std::vector<Scalar> short_log(50, 1.0);
  CHECK_THROWS_WITH_AS(fit_rate(short_log, {10, 100}), doctest::Contains("INSUFFICIENT_DATA"),
                       Error);
  CHECK_THROWS_AS(fit_rate(short_log, {20, 10}), Error);
}

TEST_CASE("finite convergence detection") {
  const GameShape shape(1, {2, 2});
  const PolicyProfile star = PolicyProfile::deterministic(shape, {{0}, {0}});
  RunLog log;
  log.pi_star = star;
  for (int n = 1; n <= 10; ++n) {
    RunRecord r;
    r.n = n;
    r.exact_hit = false;
    log.records.push_back(r);
  }
  CHECK_FALSE(detect_finite_convergence(log, star));
  for (auto& r : log.records) r.exact_hit = true;
  CHECK(detect_finite_convergence(log, star) == 1);
  log.records[4].exact_hit = false;
  CHECK(detect_finite_convergence(log, star) == 6);
  CHECK_THROWS_WITH_AS(detect_finite_convergence(log, PolicyProfile::uniform(shape)),
                       doctest::Contains("NOT_DETERMINISTIC_TARGET"), Error);

  RunLog kept;
  for (int n = 1; n <= 3; ++n) {
    RunRecord r;
    r.n = n;
    kept.records.push_back(r);
    kept.policies.push_back(n == 1 ? PolicyProfile::uniform(shape).flat() : star.flat());
  }
  CHECK(detect_finite_convergence(kept, star) == 2);
}

TEST_CASE("finite time scale") {
  CHECK(std::isinf(finite_time_scale(1.0, 1, 4, 4.0, 0.1, 1.0)));
  CHECK(finite_time_scale(1.0, 1, 4, 4.0, 0.1, 0.5) == doctest::Approx(100.0));
}

TEST_CASE("classification names") {
  CHECK(to_string(Classification::kSosNash) == "sos_nash");
  CHECK(to_string(Classification::kStrictNash) == "strict_nash");
}

}  // TEST_SUITE
