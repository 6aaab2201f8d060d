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

#ifndef SGPG_TOOLS_COMMANDS_HPP_
#define SGPG_TOOLS_COMMANDS_HPP_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sgpg/estimators.hpp"
#include "sgpg/learners.hpp"

namespace sgpg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

struct ExperimentConfig {
  std::string game = "builtin:coord2";
  std::string model = "full";
  std::string algo = "pg";
  std::string mode = "standard";
  Scalar gamma = 0.1;
  Scalar m = 0.0;
  Scalar p = 1.0;
  Scalar eps0 = 0.0;
  Scalar r_exp = 0.0;
  long long horizon = 1000;
  int seeds = 1;
  std::uint64_t master_seed = 0;
  // uniform | near:RADIUS | lazy:MARGIN | file:PATH. Empty picks near:0.2 for
  // pg and lazy:1 for lpg when a target is known, uniform otherwise.
  std::string init;
  // brute_force | none | pure:a,b;c,d | PATH
  std::string pi_star = "brute_force";
  Scalar basin_radius = 0.5;
  Scalar delta = 0.05;
  std::string noise = "uniform";
  Scalar sigma = 0.0;
  int batch = 1;
  int fos_every = 0;
  std::optional<std::pair<long long, long long>> window;
  std::filesystem::path out = "out";
  bool timing = false;
};

// Game, schedule, target and initialization resolved from a config.
struct Experiment {
  GameSpec game;
  std::string game_label;
  Algorithm algo = Algorithm::kPG;
  Schedule sched;
  NoiseConfig noise;
  std::optional<PolicyProfile> pi_star;
  Initialization init;
  std::string init_spec;
  Scalar lazy_margin = 0.0;
  long long horizon = 0;
  int fos_every = 0;
};

Experiment resolve_experiment(const ExperimentConfig& cfg);
RunLog run_one(const Experiment& ex, RngState rng);

// Worker count from SGPG_THREADS (at least 1), else the hardware concurrency.
int worker_count();

// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sgpg::cli

#endif  // SGPG_TOOLS_COMMANDS_HPP_
