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

#include <filesystem>

#include "sgpg/game.hpp"
#include "test_util.hpp"

using namespace sgpg;

namespace {

bool has_code(const std::vector<Issue>& issues, ErrorCode code) {
  for (const auto& issue : issues) {
    if (issue.code == code) return true;
  }
  return false;
}

GameSpec raw_coord2() {
  GameSpec raw;
  raw.states = {"s"};
  raw.players = {{"a", 2}, {"b", 2}};
  Matrix r(1, 4);
  r << 1, -1, -1, 1;
  raw.rewards = {r, r};
  raw.transitions = {Matrix::Constant(4, 1, 0.5)};
  raw.initial_dist = Vector::Ones(1);
  return raw;
}

}  // namespace

TEST_SUITE("game") {

TEST_CASE("shape indexing is player-major and joint actions are row-major") {
  const GameShape shape(3, {2, 3});
  CHECK(shape.dim() == 15);
  CHECK(shape.total_actions() == 5);
  CHECK(shape.player_offset(1) == 6);
  CHECK(shape.block_offset(1, 2) == 12);
  CHECK(shape.index(1, 2, 1) == 13);
  CHECK(shape.num_joint_actions() == 6);
  const std::vector<int> joint{1, 2};
  CHECK(shape.joint_index(joint) == 5);
  CHECK(shape.action_of(5, 0) == 1);
  CHECK(shape.action_of(5, 1) == 2);
}

TEST_CASE("coord2 builtin is valid with zeta 0.5") {
  const GameSpec g = builtin_game("coord2");
  CHECK(g.num_states() == 1);
  CHECK(g.shape().num_actions(0) == 2);
  CHECK(g.shape().num_actions(1) == 2);
  CHECK(g.zeta_min == doctest::Approx(0.5));
  CHECK(check_game(g).empty());
}

TEST_CASE("pennies2 is zero-sum") {
  const GameSpec g = builtin_game("pennies2");
  CHECK((g.rewards[0] + g.rewards[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random builtin has constant stopping and is reproducible") {
  const GameParams params{{"seed", "7"}, {"states", "3"}, {"actions", "2x3"}, {"zeta", "0.4"}};
  const GameSpec a = builtin_game("random", params);
  const GameSpec b = builtin_game("random", params);
  CHECK(a == b);
  CHECK(a.num_states() == 3);
  CHECK(a.shape().num_actions(1) == 3);
  CHECK((a.stop_probs.array() - 0.4).abs().maxCoeff() < 1e-12);
  const GameSpec c = builtin_game("random", {{"seed", "8"}, {"states", "3"}, {"actions", "2x3"},
                                             {"zeta", "0.4"}});
  CHECK_FALSE(a == c);
}

TEST_CASE("full-mass transitions are rejected as zero stop probability") {
  GameSpec raw = raw_coord2();
  raw.transitions[0](2, 0) = 1.0;
  CHECK(has_code(check_game(raw), ErrorCode::kZeroStopProbability));
  CHECK_THROWS_AS(validate_game(raw), ValidationError);
}

TEST_CASE("reward 1.5 is out of range") {
  GameSpec raw = raw_coord2();
  raw.rewards[0](0, 1) = 1.5;
  CHECK(has_code(check_game(raw), ErrorCode::kRewardOutOfRange));
}

TEST_CASE("validation reports every issue at once") {
  GameSpec raw = raw_coord2();
  raw.rewards[1](0, 0) = -2.0;
  raw.transitions[0](0, 0) = -0.1;
  raw.initial_dist[0] = 0.0;
  try {
    validate_game(raw);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(has_code(e.issues(), ErrorCode::kRewardOutOfRange));
    CHECK(has_code(e.issues(), ErrorCode::kNegativeProbability));
    CHECK(has_code(e.issues(), ErrorCode::kEmptySupportInitialDist));
  }
}

TEST_CASE("mass above one and non-finite entries are flagged") {
  GameSpec raw = raw_coord2();
  raw.transitions[0](1, 0) = 1.2;
  raw.rewards[0](0, 0) = std::numeric_limits<Scalar>::quiet_NaN();
  const auto issues = check_game(raw);
  CHECK(has_code(issues, ErrorCode::kRowSumMismatch));
  CHECK(has_code(issues, ErrorCode::kNonFiniteInput));
}

TEST_CASE("shape mismatches are dimension errors") {
  GameSpec raw = raw_coord2();
  raw.rewards[0] = Matrix::Zero(1, 3);
  CHECK(has_code(check_game(raw), ErrorCode::kDimensionMismatch));
}

TEST_CASE("stop probabilities are derived exactly from row sums") {
  const GameSpec g = builtin_game("handoff2");
  CHECK(g.stop_probs(0, 0) == 0.5);
  CHECK(g.stop_probs(0, 3) == 1.0);
  CHECK(g.stop_probs(1, 1) == 1.0);
  CHECK(g.zeta_min == 0.5);
  CHECK(g.initial_dist.sum() == doctest::Approx(1.0));
}

TEST_CASE("initial distribution off by less than the tolerance is renormalized") {
  GameSpec raw = builtin_game("handoff2");
  raw.initial_dist << 0.9, 0.1000000001;
  std::vector<std::string> warnings;
  const GameSpec g = validate_game(raw, 1e-9, &warnings);
  CHECK(g.initial_dist.sum() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(warnings.size() == 1);
  raw.initial_dist << 0.9, 0.2;
  CHECK_THROWS_AS(validate_game(raw, 1e-9), ValidationError);
}

TEST_CASE("builtin errors") {
  CHECK_THROWS_WITH_AS(builtin_game("nope"), doctest::Contains("UNKNOWN_NAME"), Error);
  CHECK_THROWS_WITH_AS(builtin_game("coord2", {{"zeta", "0.3"}}),
                       doctest::Contains("BAD_PARAMS"), Error);
  CHECK_THROWS_AS(resolve_game("builtin:single_state:zeta"), Error);
  const GameSpec g = resolve_game("builtin:single_state:zeta=0.25,payoff=zero");
  CHECK(g.zeta_min == doctest::Approx(0.25));
  CHECK(g.rewards[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("save then load is the identity") {
  const auto dir = std::filesystem::temp_directory_path() / "sgpg_game_roundtrip";
  std::filesystem::create_directories(dir);
  for (const auto& name : testing::builtin_names()) {
    const GameSpec g = builtin_game(name);
    const auto path = dir / (name + ".json");
    save_game(g, path);
    CHECK(load_game(path) == g);
  }
}

TEST_CASE("a file missing transitions names the field") {
  const std::string text = R"({"states": ["s"], "players": [{"actions": 2}, {"actions": 2}],
    "rewards": [[[1, -1, -1, 1]], [[1, -1, -1, 1]]], "initial_dist": [1]})";
  CHECK_THROWS_WITH_AS(game_from_json_text(text), doctest::Contains("transitions"), Error);
  try {
    game_from_json_text(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParseError);
  }
}

TEST_CASE("syntax errors report a line") {
  CHECK_THROWS_WITH_AS(game_from_json_text("{\n\"states\": [\n}"), doctest::Contains("line"),
                       Error);
}

TEST_CASE("action lists may be names") {
  const std::string text = R"({"states": ["s"],
    "players": [{"name": "row", "actions": ["u", "d"]}, {"actions": 2}],
    "rewards": [[[1, -1, -1, 1]], [[1, -1, -1, 1]]],
    "transitions": [[[0.5], [0.5], [0.5], [0.5]]], "initial_dist": [1]})";
  const GameSpec g = game_from_json_text(text);
  CHECK(g.players[0].name == "row");
  CHECK(g.players[0].actions == 2);
}

TEST_CASE("policy profile factories and predicates") {
  const GameShape shape(2, {2, 3});
  const PolicyProfile u = PolicyProfile::uniform(shape);
  CHECK(u.is_feasible());
  CHECK_FALSE(u.is_deterministic());
  CHECK(u.min_prob(1) == doctest::Approx(1.0 / 3.0));
  CHECK(u.min_prob() == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_WITH_AS(u.pure_choices(), doctest::Contains("NOT_DETERMINISTIC_TARGET"), Error);

  const PolicyProfile d = PolicyProfile::deterministic(shape, {{1, 0}, {2, 2}});
  CHECK(d.is_deterministic());
  CHECK(d.pure_choices() == std::vector<std::vector<int>>{{1, 0}, {2, 2}});
  CHECK(d.prob(1, 0, 2) == 1.0);
  const Vector jp = d.joint_probs(0);
  CHECK(jp[shape.joint_index(std::vector<int>{1, 2})] == 1.0);

  Vector bad = u.flat();
  bad[0] = -0.1;
  bad[1] = 1.1;
  CHECK_THROWS_WITH_AS(PolicyProfile::checked(shape, bad), doctest::Contains("INFEASIBLE_POLICY"),
                       Error);
  bad[0] = std::numeric_limits<Scalar>::infinity();
  CHECK_THROWS_WITH_AS(PolicyProfile::checked(shape, bad), doctest::Contains("NON_FINITE_INPUT"),
                       Error);
}

TEST_CASE("joint probabilities are products of rows") {
  const GameShape shape(1, {2, 2});
  const PolicyProfile pi = testing::mixed(shape, {{0.75, 0.25}, {0.4, 0.6}});
  const Vector jp = pi.joint_probs(0);
  CHECK(jp[0] == doctest::Approx(0.3));
  CHECK(jp[1] == doctest::Approx(0.45));
  CHECK(jp[2] == doctest::Approx(0.1));
  CHECK(jp[3] == doctest::Approx(0.15));
}

TEST_CASE("error messages carry the code name") {
  const Error e(ErrorCode::kTooLarge, "x");
  CHECK(std::string(e.what()) == "TOO_LARGE: x");
  CHECK(is_config_error(ErrorCode::kParseError));
  CHECK_FALSE(is_config_error(ErrorCode::kInvariantBreach));
}

}  // TEST_SUITE
