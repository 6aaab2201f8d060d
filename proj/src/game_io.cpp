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

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgpg/game.hpp"

namespace sgpg {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& message) {
  throw Error(ErrorCode::kParseError, message);
}

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    parse_fail(std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

Scalar as_number(const json& value, const std::string& field) {
  if (!value.is_number()) parse_fail("field '" + field + "' must hold numbers");
  return value.get<Scalar>();
}

// Reads an array-of-arrays into a rows x cols matrix.
Matrix as_matrix(const json& value, int rows, int cols, const std::string& field) {
  if (!value.is_array() || static_cast<int>(value.size()) != rows) {
    parse_fail("field '" + field + "' must have " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = value[r];
    const std::string at = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      parse_fail("field '" + at + "' must have " + std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = as_number(row[c], at);
  }
  return m;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
}

}  // namespace

GameSpec game_from_json_text(const std::string& text, std::vector<std::string>* warnings) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail("malformed JSON at line " + std::to_string(line_of(text, e.byte)) + ": " +
               e.what());
  }
  GameSpec raw;
  const json& states = require(doc, "states");
  if (!states.is_array() || states.empty()) parse_fail("field 'states' must be a non-empty array");
  for (const auto& s : states) {
    if (!s.is_string()) parse_fail("field 'states' must hold strings");
    raw.states.push_back(s.get<std::string>());
  }
  const json& players = require(doc, "players");
  if (!players.is_array() || players.empty()) {
    parse_fail("field 'players' must be a non-empty array");
  }
  for (std::size_t i = 0; i < players.size(); ++i) {
    const json& p = players[i];
    const std::string at = "players[" + std::to_string(i) + "]";
    PlayerSpec spec;
    spec.name = p.is_object() && p.contains("name") && p["name"].is_string()
                    ? p["name"].get<std::string>()
                    : "p" + std::to_string(i + 1);
    if (!p.is_object() || !p.contains("actions")) parse_fail("missing field '" + at + ".actions'");
    const json& actions = p["actions"];
    if (actions.is_number_integer()) {
      spec.actions = actions.get<int>();
    } else if (actions.is_array()) {
      spec.actions = static_cast<int>(actions.size());
    } else {
      parse_fail("field '" + at + ".actions' must be a count or a list of names");
    }
    if (spec.actions < 1) parse_fail("field '" + at + ".actions' must be >= 1");
    raw.players.push_back(std::move(spec));
  }
  const int S = raw.num_states();
  int joint = 1;
  for (const auto& p : raw.players) joint *= p.actions;

  const json& rewards = require(doc, "rewards");
  if (!rewards.is_array() || rewards.size() != raw.players.size()) {
    parse_fail("field 'rewards' must have one entry per player");
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    raw.rewards.push_back(
        as_matrix(rewards[i], S, joint, "rewards[" + std::to_string(i) + "]"));
  }
  const json& transitions = require(doc, "transitions");
  if (!transitions.is_array() || static_cast<int>(transitions.size()) != S) {
    parse_fail("field 'transitions' must have one entry per state");
  }
  for (int s = 0; s < S; ++s) {
    raw.transitions.push_back(
        as_matrix(transitions[s], joint, S, "transitions[" + std::to_string(s) + "]"));
  }
  const json& rho = require(doc, "initial_dist");
  if (!rho.is_array() || static_cast<int>(rho.size()) != S) {
    parse_fail("field 'initial_dist' must have one entry per state");
  }
  raw.initial_dist.resize(S);
  for (int s = 0; s < S; ++s) raw.initial_dist[s] = as_number(rho[s], "initial_dist");
  return validate_game(raw, 1e-9, warnings);
}

std::string game_to_json_text(const GameSpec& game) {
  json doc;
  doc["states"] = game.states;
  doc["players"] = json::array();
  for (const auto& p : game.players) {
    doc["players"].push_back({{"name", p.name}, {"actions", p.actions}});
  }
  auto matrix_json = [](const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  doc["rewards"] = json::array();
  for (const auto& r : game.rewards) doc["rewards"].push_back(matrix_json(r));
  doc["transitions"] = json::array();
  for (const auto& P : game.transitions) doc["transitions"].push_back(matrix_json(P));
  doc["initial_dist"] = std::vector<Scalar>(game.initial_dist.begin(), game.initial_dist.end());
  return doc.dump(2) + "\n";
}

GameSpec load_game(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open game file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return game_from_json_text(buffer.str(), warnings);
}

void save_game(const GameSpec& game, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write game file " + path.string());
  out << game_to_json_text(game);
}

}  // namespace sgpg
