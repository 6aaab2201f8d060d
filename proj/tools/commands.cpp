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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgpg/analysis.hpp"
#include "sgpg/exact.hpp"
#include "sgpg/runlog_io.hpp"
#include "sgpg/simulation.hpp"

namespace sgpg::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad_params(const std::string& message) {
  throw Error(ErrorCode::kBadParams, message);
}

json policy_json(const PolicyProfile& pi) { return json::parse(policy_to_json_text(pi))["policy"]; }

json vector_json(const Vector& x) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) arr.push_back(x[k]);
  return arr;
}

Scalar parse_number(const std::string& text, const std::string& field) {
  try {
    std::size_t used = 0;
    const Scalar x = std::stod(text, &used);
    if (used == text.size()) return x;
  } catch (const std::exception&) {
  }
  bad_params("field '" + field + "' expects a number, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

// pure:a,b;c,d lists each player's actions per state, players separated by ';'.
PolicyProfile parse_pure(const std::string& text, const GameShape& shape) {
  const auto players = split(text, ';');
  if (static_cast<int>(players.size()) != shape.num_players()) {
    bad_params("pi_star 'pure:' needs one group per player");
  }
  std::vector<std::vector<int>> choices;
  for (int i = 0; i < shape.num_players(); ++i) {
    const auto states = split(players[i], ',');
    if (static_cast<int>(states.size()) != shape.num_states()) {
      bad_params("pi_star 'pure:' needs one action per state for player " + std::to_string(i));
    }
    std::vector<int> row;
    for (const auto& a : states) {
      const Scalar x = parse_number(a, "pi_star");
      if (x != std::floor(x) || x < 0 || x >= shape.num_actions(i)) {
        bad_params("pi_star 'pure:' action out of range: " + a);
      }
      row.push_back(static_cast<int>(x));
    }
    choices.push_back(std::move(row));
  }
  return PolicyProfile::deterministic(shape, choices);
}

// First strict Nash vertex in enumeration order, else the first Nash vertex.
std::optional<PolicyProfile> default_target(const GameSpec& game) {
  const auto found = brute_force_deterministic_nash(game);
  for (const auto& pi : found) {
    if (classify_equilibrium(game, pi).classification == Classification::kStrictNash) return pi;
  }
  if (!found.empty()) return found.front();
  return std::nullopt;
}

json config_json(const ExperimentConfig& cfg) {
  json doc;
  doc["game"] = cfg.game;
  doc["model"] = cfg.model;
  doc["algo"] = cfg.algo;
  doc["mode"] = cfg.mode;
  doc["gamma"] = cfg.gamma;
  doc["m"] = cfg.m;
  doc["p"] = cfg.p;
  doc["eps0"] = cfg.eps0;
  doc["r_exp"] = cfg.r_exp;
  doc["horizon"] = cfg.horizon;
  doc["seeds"] = cfg.seeds;
  doc["master_seed"] = cfg.master_seed;
  doc["init"] = cfg.init;
  doc["pi_star"] = cfg.pi_star;
  doc["basin_radius"] = cfg.basin_radius;
  doc["delta"] = cfg.delta;
  doc["noise"] = cfg.noise;
  doc["sigma"] = cfg.sigma;
  doc["batch"] = cfg.batch;
  doc["fos_every"] = cfg.fos_every;
  if (cfg.window) doc["window"] = {cfg.window->first, cfg.window->second};
  return doc;
}

std::pair<long long, long long> parse_window(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) bad_params("field 'window' expects LO,HI");
  return {static_cast<long long>(parse_number(parts[0], "window")),
          static_cast<long long>(parse_number(parts[1], "window"))};
}

void parallel_for(int count, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), std::max(count, 1));
  std::atomic<int> next{0};
  auto loop = [&] {
    for (int k = next++; k < count; k = next++) body(k);
  };
  if (workers <= 1) {
    loop();
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
  for (auto& t : pool) t.join();
}

// Outcome of one run inside a pool; errors are reported after the pool joins.
struct Outcome {
  std::optional<RunLog> log;
  std::optional<ErrorCode> code;
  std::string message;
};

Outcome guarded_run(const Experiment& ex, RngState rng) {
  Outcome outcome;
  try {
    outcome.log = run_one(ex, rng);
  } catch (const RunAborted& e) {
    outcome.log = e.log();
    outcome.code = e.code();
    outcome.message = e.what();
  } catch (const Error& e) {
    outcome.code = e.code();
    outcome.message = e.what();
  }
  return outcome;
}

Scalar median(std::vector<Scalar> xs) {
  if (xs.empty()) return std::numeric_limits<Scalar>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

json fit_json(const RateFit& fit) {
  return {{"slope", fit.slope},
          {"std_err", fit.std_err},
          {"intercept", fit.intercept},
          {"points", fit.points},
          {"runs_used", fit.runs_used},
          {"runs_excluded", fit.runs_excluded},
          {"exclusion_fraction", fit.exclusion_fraction}};
}

std::pair<long long, long long> default_window(long long horizon) {
  return {std::max<long long>(1, horizon / 100), horizon};
}

json summarize(const Experiment& ex, const ExperimentConfig& cfg,
               const std::vector<Outcome>& outcomes) {
  json doc;
  doc["config"] = config_json(cfg);
  doc["config"]["init"] = ex.init_spec;
  doc["pi_star"] = ex.pi_star ? policy_json(*ex.pi_star) : json(nullptr);
  json runs = json::array();
  std::vector<Scalar> finals;
  std::vector<Scalar> n0s;
  std::vector<const RunLog*> completed;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const Outcome& o = outcomes[k];
    json run;
    run["seed_index"] = k;
    run["failure"] = o.code ? json(o.message) : json(nullptr);
    if (o.log && o.log->final_pi && ex.pi_star) {
      const Scalar d2 = (o.log->final_pi->flat() - ex.pi_star->flat()).squaredNorm();
      run["final_dist_sq"] = d2;
      finals.push_back(d2);
    }
    if (o.log && o.log->n0) {
      run["n0"] = *o.log->n0;
      n0s.push_back(static_cast<Scalar>(*o.log->n0));
    } else {
      run["n0"] = nullptr;
    }
    if (o.log && !o.code) completed.push_back(&*o.log);
    runs.push_back(std::move(run));
  }
  doc["runs"] = std::move(runs);
  if (!finals.empty()) {
    Scalar mean = 0.0;
    for (Scalar x : finals) mean += x;
    doc["final_dist_sq"] = {{"mean", mean / finals.size()}, {"median", median(finals)}};
  }
  if (ex.pi_star && ex.pi_star->is_deterministic()) {
    json n0 = {{"reached", n0s.size()},
               {"fraction", static_cast<Scalar>(n0s.size()) / outcomes.size()}};
    if (!n0s.empty()) {
      n0["min"] = *std::min_element(n0s.begin(), n0s.end());
      n0["median"] = median(n0s);
      n0["max"] = *std::max_element(n0s.begin(), n0s.end());
    }
    doc["n0"] = std::move(n0);
  }
  if (ex.pi_star && !completed.empty()) {
    try {
      const auto window = cfg.window.value_or(default_window(ex.horizon));
      RateFit fit = fit_rate(completed, window, cfg.basin_radius);
      json fj = fit_json(fit);
      fj["window"] = {window.first, window.second};
      doc["rate_fit"] = std::move(fj);
    } catch (const Error& e) {
      doc["rate_fit"] = {{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
  }
  if (ex.algo == Algorithm::kLPG && ex.pi_star && ex.pi_star->is_deterministic()) {
    const auto report = classify_equilibrium(ex.game, *ex.pi_star);
    if (report.classification == Classification::kStrictNash) {
      const GameShape shape = ex.game.shape();
      const Scalar scale =
          finite_time_scale(ex.lazy_margin > 0 ? ex.lazy_margin : 1.0, shape.num_states(),
                            shape.total_actions(), report.strict_gaps.minCoeff(),
                            ex.sched.gamma, ex.sched.p);
      doc["finite_time_scale"] = std::isfinite(scale) ? json(scale) : json(nullptr);
    }
  }
  return doc;
}

int report_error(const Error& e, std::ostream& err) {
  const int code = is_config_error(e.code()) ? kExitConfig : kExitRuntime;
  json doc;
  doc["error"] = std::string(to_string(e.code()));
  doc["message"] = e.what();
  doc["exit_code"] = code;
  if (const auto* v = dynamic_cast<const ValidationError*>(&e)) {
    json issues = json::array();
    for (const Issue& issue : v->issues()) {
      issues.push_back({{"code", std::string(to_string(issue.code))}, {"message", issue.message}});
    }
    doc["issues"] = std::move(issues);
  }
  err << doc.dump() << "\n";
  return code;
}

int first_failure(const std::vector<Outcome>& outcomes, std::ostream& err) {
  for (const Outcome& o : outcomes) {
    if (o.code) return report_error(Error(*o.code, o.message), err);
  }
  return kExitOk;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// ---- commands ----

int cmd_validate(const std::string& game_spec, std::ostream& out) {
  std::vector<std::string> warnings;
  const GameSpec game = resolve_game(game_spec, &warnings);
  const GameShape shape = game.shape();
  json doc;
  doc["valid"] = true;
  doc["states"] = shape.num_states();
  doc["players"] = shape.num_players();
  json actions = json::array();
  for (int i = 0; i < shape.num_players(); ++i) actions.push_back(shape.num_actions(i));
  doc["actions"] = std::move(actions);
  doc["zeta_min"] = game.zeta_min;
  doc["warnings"] = warnings;
  out << doc.dump(2) << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string game;
  std::string policy;
  bool brute_force = false;
  Scalar tol = 1e-8;
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out) {
  const GameSpec game = resolve_game(args.game);
  const GameShape shape = game.shape();
  if (args.policy.empty() && !args.brute_force) {
    bad_params("analyze needs --policy or --brute-force");
  }
  json doc;
  if (args.brute_force) {
    json list = json::array();
    for (const auto& pi : brute_force_deterministic_nash(game)) {
      list.push_back({{"policy", policy_json(pi)},
                      {"report", json::parse(report_to_json_text(
                                     classify_equilibrium(game, pi, args.tol)))}});
    }
    doc["deterministic_nash"] = std::move(list);
  }
  if (!args.policy.empty()) {
    const PolicyProfile pi = load_policy(args.policy, shape);
    doc["policy"] = policy_json(pi);
    doc["report"] = json::parse(report_to_json_text(classify_equilibrium(game, pi, args.tol)));
  }
  const std::string text = doc.dump(2) + "\n";
  if (args.out.empty()) {
    out << text;
  } else {
    write_text_file(args.out, text);
  }
  return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.seeds < 1) bad_params("field 'seeds' must be >= 1");
  const Experiment ex = resolve_experiment(cfg);
  ensure_dir(cfg.out);
  std::vector<Outcome> outcomes(cfg.seeds);
  parallel_for(cfg.seeds, [&](int k) {
    outcomes[k] = guarded_run(ex, RngState{cfg.master_seed, static_cast<std::uint64_t>(k)});
    if (outcomes[k].log) {
      const std::string stem = "run_" + std::to_string(k);
      write_run_files(*outcomes[k].log, cfg.out / (stem + ".csv"), cfg.out / (stem + ".json"),
                      cfg.timing);
    }
  });
  const json summary = summarize(ex, cfg, outcomes);
  write_text_file(cfg.out / "summary.json", summary.dump(2) + "\n");
  out << summary.dump(2) << "\n";
  return first_failure(outcomes, err);
}

void apply_field(ExperimentConfig& cfg, const std::string& key, const json& value) {
  auto number = [&]() -> Scalar {
    if (!value.is_number()) bad_params("field '" + key + "' must be a number");
    return value.get<Scalar>();
  };
  auto integer = [&]() -> long long {
    if (!value.is_number_integer()) bad_params("field '" + key + "' must be an integer");
    return value.get<long long>();
  };
  auto text = [&]() -> std::string {
    if (!value.is_string()) bad_params("field '" + key + "' must be a string");
    return value.get<std::string>();
  };
  if (key == "game") cfg.game = text();
  else if (key == "model") cfg.model = text();
  else if (key == "algo") cfg.algo = text();
  else if (key == "mode") cfg.mode = text();
  else if (key == "gamma") cfg.gamma = number();
  else if (key == "m") cfg.m = number();
  else if (key == "p") cfg.p = number();
  else if (key == "eps0") cfg.eps0 = number();
  else if (key == "r_exp") cfg.r_exp = number();
  else if (key == "horizon") cfg.horizon = integer();
  else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(integer());
  else if (key == "init") cfg.init = text();
  else if (key == "pi_star") cfg.pi_star = text();
  else if (key == "basin_radius") cfg.basin_radius = number();
  else if (key == "delta") cfg.delta = number();
  else if (key == "noise") cfg.noise = text();
  else if (key == "sigma") cfg.sigma = number();
  else if (key == "batch") cfg.batch = static_cast<int>(integer());
  else if (key == "fos_every") cfg.fos_every = static_cast<int>(integer());
  else if (key == "window") {
    if (!value.is_array() || value.size() != 2) bad_params("field 'window' must be [lo, hi]");
    cfg.window = std::make_pair(value[0].get<long long>(), value[1].get<long long>());
  } else {
    bad_params("unknown config field '" + key + "'");
  }
}

std::vector<Scalar> number_list(const json& value, const std::string& key) {
  std::vector<Scalar> xs;
  if (value.is_number()) {
    xs.push_back(value.get<Scalar>());
  } else if (value.is_array() && !value.empty()) {
    for (const json& x : value) {
      if (!x.is_number()) bad_params("field '" + key + "' must hold numbers");
      xs.push_back(x.get<Scalar>());
    }
  } else {
    bad_params("field '" + key + "' must be a number or a non-empty array");
  }
  return xs;
}

int cmd_sweep(const std::string& config_path, const std::string& out_override,
              bool timing, std::ostream& out, std::ostream& err) {
  json doc;
  try {
    doc = json::parse(read_file(config_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("sweep config: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "sweep config must be an object");

  ExperimentConfig base;
  std::vector<Scalar> gammas{base.gamma};
  std::vector<Scalar> ps{base.p};
  std::vector<std::uint64_t> seeds{0};
  for (const auto& [key, value] : doc.items()) {
    if (key == "gamma") {
      gammas = number_list(value, key);
    } else if (key == "p") {
      ps = number_list(value, key);
    } else if (key == "seeds") {
      seeds.clear();
      if (value.is_number_integer()) {
        if (value.get<long long>() < 1) bad_params("field 'seeds' must be >= 1");
        for (long long k = 0; k < value.get<long long>(); ++k) seeds.push_back(k);
      } else if (value.is_array() && !value.empty()) {
        for (const json& s : value) {
          if (!s.is_number_integer()) bad_params("field 'seeds' must hold integers");
          seeds.push_back(s.get<std::uint64_t>());
        }
      } else {
        bad_params("field 'seeds' must be a count or a non-empty array");
      }
    } else if (key == "out") {
      if (!value.is_string()) bad_params("field 'out' must be a string");
      base.out = value.get<std::string>();
    } else {
      apply_field(base, key, value);
    }
  }
  if (!out_override.empty()) base.out = out_override;
  base.timing = timing;

  Experiment ex = resolve_experiment(base);
  struct Entry {
    Scalar gamma;
    Scalar p;
    std::uint64_t seed;
  };
  std::vector<Entry> entries;
  for (Scalar g : gammas) {
    for (Scalar p : ps) {
      Schedule sched = ex.sched;
      sched.gamma = g;
      sched.p = p;
      const auto failed = schedule_violations(sched);
      if (!failed.empty()) {
        std::string msg = "gamma=" + format_scalar(g) + " p=" + format_scalar(p) + " failed: ";
        for (std::size_t k = 0; k < failed.size(); ++k) msg += (k ? "; " : "") + failed[k];
        throw Error(ErrorCode::kInadmissibleSchedule, msg);
      }
      for (auto s : seeds) entries.push_back({g, p, s});
    }
  }

  ensure_dir(base.out);
  std::vector<Outcome> outcomes(entries.size());
  parallel_for(static_cast<int>(entries.size()), [&](int k) {
    Experiment local = ex;
    local.sched.gamma = entries[k].gamma;
    local.sched.p = entries[k].p;
    outcomes[k] = guarded_run(local, RngState{base.master_seed, entries[k].seed});
    if (outcomes[k].log) {
      const std::string stem = "entry_" + std::to_string(k);
      write_run_files(*outcomes[k].log, base.out / (stem + ".csv"), base.out / (stem + ".json"),
                      timing);
    }
  });

  std::string summary = "entry,gamma,p,seed,status,final_dist_sq,n0\n";
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Outcome& o = outcomes[k];
    Scalar d2 = std::numeric_limits<Scalar>::quiet_NaN();
    if (o.log && o.log->final_pi && ex.pi_star) {
      d2 = (o.log->final_pi->flat() - ex.pi_star->flat()).squaredNorm();
    }
    summary += std::to_string(k) + "," + format_scalar(entries[k].gamma) + "," +
               format_scalar(entries[k].p) + "," + std::to_string(entries[k].seed) + "," +
               (o.code ? std::string(to_string(*o.code)) : std::string("ok")) + "," +
               format_scalar(d2) + "," +
               (o.log && o.log->n0 ? std::to_string(*o.log->n0) : std::string("")) + "\n";
  }
  std::string rates = "gamma,p,slope,std_err,points,runs_used,runs_excluded,status\n";
  if (ex.pi_star) {
    const auto window = base.window.value_or(default_window(base.horizon));
    for (Scalar g : gammas) {
      for (Scalar p : ps) {
        std::vector<const RunLog*> group;
        for (std::size_t k = 0; k < entries.size(); ++k) {
          if (entries[k].gamma == g && entries[k].p == p && outcomes[k].log && !outcomes[k].code) {
            group.push_back(&*outcomes[k].log);
          }
        }
        std::string row = format_scalar(g) + "," + format_scalar(p) + ",";
        try {
          const RateFit fit = fit_rate(group, window, base.basin_radius);
          row += format_scalar(fit.slope) + "," + format_scalar(fit.std_err) + "," +
                 std::to_string(fit.points) + "," + std::to_string(fit.runs_used) + "," +
                 std::to_string(fit.runs_excluded) + ",ok";
        } catch (const Error& e) {
          row += ",,,,," + std::string(to_string(e.code()));
        }
        rates += row + "\n";
      }
    }
  }
  write_text_file(base.out / "summary.csv", summary);
  write_text_file(base.out / "rates.csv", rates);
  out << summary;
  return first_failure(outcomes, err);
}

struct EstimatorArgs {
  std::string game = "builtin:coord2";
  std::string policy;
  std::string model = "value_based";
  Scalar eps = 0.3;
  std::string noise = "uniform";
  Scalar sigma = 0.0;
  long long episodes = 100000;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_estimator_stats(const EstimatorArgs& args, std::ostream& out) {
  const GameSpec game = resolve_game(args.game);
  const GameShape shape = game.shape();
  if (args.episodes < 2) bad_params("field 'episodes' must be >= 2");
  const PolicyProfile pi =
      args.policy.empty() ? PolicyProfile::uniform(shape) : load_policy(args.policy, shape);
  const FeedbackModel model = parse_feedback_model(args.model);
  NoiseConfig noise;
  noise.sigma = args.sigma;
  if (args.noise == "gaussian") {
    noise.kind = NoiseKind::kGaussian;
  } else if (args.noise != "uniform") {
    bad_params("field 'noise' must be uniform or gaussian");
  }
  const Scalar eps = model == FeedbackModel::kValueBased ? args.eps : 0.0;
  const PolicyProfile pi_hat = model == FeedbackModel::kValueBased ? mix_policy(pi, eps) : pi;
  const Vector v = policy_gradient(game, pi).v;
  const Vector mean_target = policy_gradient(game, pi_hat).v;

  Rng rng(RngState{args.seed, 0});
  const Eigen::Index dim = shape.dim();
  Vector sum = Vector::Zero(dim);
  Vector sum_sq = Vector::Zero(dim);
  Vector mse_true = Vector::Zero(shape.num_players());
  Vector mse_mean = Vector::Zero(shape.num_players());
  for (long long k = 0; k < args.episodes; ++k) {
    const GradientSignal signal = make_signal(model, game, pi, eps, noise, rng);
    sum += signal.vhat;
    sum_sq += signal.vhat.cwiseAbs2();
    for (int i = 0; i < shape.num_players(); ++i) {
      const auto off = shape.player_offset(i);
      const auto len = shape.player_dim(i);
      mse_true[i] += (signal.vhat.segment(off, len) - v.segment(off, len)).squaredNorm();
      mse_mean[i] += (signal.vhat.segment(off, len) - mean_target.segment(off, len)).squaredNorm();
    }
  }
  const Scalar count = static_cast<Scalar>(args.episodes);
  const Vector mean = sum / count;
  const Vector var = ((sum_sq / count) - mean.cwiseAbs2()) * (count / (count - 1.0));
  const Vector se = (var.cwiseMax(0.0) / count).cwiseSqrt();
  Scalar max_z = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Scalar diff = std::abs(mean[k] - mean_target[k]);
    if (se[k] > 0.0) max_z = std::max(max_z, diff / se[k]);
    else if (diff > 0.0) max_z = std::numeric_limits<Scalar>::infinity();
  }

  const Scalar zeta = game.zeta_min;
  json players = json::array();
  for (int i = 0; i < shape.num_players(); ++i) {
    const Scalar A = shape.num_actions(i);
    json pj;
    pj["mse_vs_exact"] = mse_true[i] / count;
    pj["mse_vs_conditional_mean"] = mse_mean[i] / count;
    pj["min_prob_sampling"] = pi_hat.min_prob(i);
    if (model == FeedbackModel::kValueBased) {
      pj["bound_kappa"] = pi_hat.min_prob(i) > 0.0
                              ? json(24.0 * A / (pi_hat.min_prob(i) * std::pow(zeta, 4)))
                              : json(nullptr);
      pj["bound_eps"] = eps > 0.0 ? json(24.0 * A * A / (eps * std::pow(zeta, 4))) : json(nullptr);
    }
    players.push_back(std::move(pj));
  }
  json doc;
  doc["game"] = args.game;
  doc["model"] = std::string(to_string(model));
  doc["eps"] = eps;
  doc["episodes"] = args.episodes;
  doc["seed"] = args.seed;
  doc["exact_gradient"] = vector_json(v);
  doc["expected_signal"] = vector_json(mean_target);
  doc["empirical_mean"] = vector_json(mean);
  doc["std_err"] = vector_json(se);
  doc["max_abs_z"] = max_z;
  doc["players"] = std::move(players);
  if (model == FeedbackModel::kValueBased) doc["bias_constant"] = bias_constant(game);
  const std::string text = doc.dump(2) + "\n";
  if (args.out.empty()) {
    out << text;
  } else {
    write_text_file(args.out, text);
  }
  return kExitOk;
}

void add_experiment_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& window) {
  cmd->add_option("--game", cfg.game, "Game file or builtin:NAME[:k=v,...]")->capture_default_str();
  cmd->add_option("--model", cfg.model, "Feedback model")
      ->check(CLI::IsMember({"full", "stochastic", "value_based"}))
      ->capture_default_str();
  cmd->add_option("--algo", cfg.algo, "Learner")
      ->check(CLI::IsMember({"pg", "lpg"}))
      ->capture_default_str();
  cmd->add_option("--mode", cfg.mode, "Step-size mode")
      ->check(CLI::IsMember({"standard", "geometric"}))
      ->capture_default_str();
  cmd->add_option("--gamma", cfg.gamma, "Base step size")->capture_default_str();
  cmd->add_option("--m", cfg.m, "Step-size offset")->capture_default_str();
  cmd->add_option("--p", cfg.p, "Step-size exponent")->capture_default_str();
  cmd->add_option("--eps0", cfg.eps0, "Base exploration rate (value_based)")->capture_default_str();
  cmd->add_option("--r-exp", cfg.r_exp, "Exploration decay exponent")->capture_default_str();
  cmd->add_option("--horizon", cfg.horizon, "Iterations per run")->capture_default_str();
  cmd->add_option("--seeds", cfg.seeds, "Number of runs")->capture_default_str();
  cmd->add_option("--master-seed,--seed", cfg.master_seed, "Master seed")->capture_default_str();
  cmd->add_option("--init", cfg.init,
                  "uniform | near:RADIUS | lazy:MARGIN | file:PATH (default near:0.2 for pg, "
                  "lazy:1 for lpg when a target is known)");
  cmd->add_option("--pi-star", cfg.pi_star, "brute_force | none | pure:a,b;c,d | PATH")
      ->capture_default_str();
  cmd->add_option("--basin-radius", cfg.basin_radius, "Runs farther than this are excluded from rate fits")
      ->capture_default_str();
  cmd->add_option("--delta", cfg.delta, "Confidence level, reported only")->capture_default_str();
  cmd->add_option("--noise", cfg.noise, "Noise law for the stochastic model")
      ->check(CLI::IsMember({"uniform", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--sigma", cfg.sigma, "Noise scale for the stochastic model")->capture_default_str();
  cmd->add_option("--batch", cfg.batch, "Episodes per value-based signal")->capture_default_str();
  cmd->add_option("--fos-every", cfg.fos_every, "Log the FOS residual every k iterations")
      ->capture_default_str();
  cmd->add_option("--window", window, "Rate-fit window LO,HI (default horizon/100,horizon)");
  cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  cmd->add_flag("--timing", cfg.timing, "Include wall time in sidecars");
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("SGPG_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Experiment resolve_experiment(const ExperimentConfig& cfg) {
  Experiment ex;
  ex.game = resolve_game(cfg.game);
  ex.game_label = cfg.game;
  const GameShape shape = ex.game.shape();
  ex.algo = parse_algorithm(cfg.algo);
  if (cfg.horizon < 1) bad_params("field 'horizon' must be >= 1");
  ex.horizon = cfg.horizon;
  ex.fos_every = cfg.fos_every;
  if (cfg.fos_every < 0) bad_params("field 'fos_every' must be >= 0");

  ex.sched.gamma = cfg.gamma;
  ex.sched.m = cfg.m;
  ex.sched.p = cfg.p;
  ex.sched.eps0 = cfg.eps0;
  ex.sched.r_exp = cfg.r_exp;
  ex.sched.model = parse_feedback_model(cfg.model);
  if (cfg.mode == "geometric") {
    ex.sched.mode = StepMode::kGeometric;
  } else if (cfg.mode != "standard") {
    bad_params("field 'mode' must be standard or geometric");
  }
  validate_schedule(ex.sched);

  if (cfg.noise == "gaussian") {
    ex.noise.kind = NoiseKind::kGaussian;
  } else if (cfg.noise != "uniform") {
    bad_params("field 'noise' must be uniform or gaussian");
  }
  if (!(cfg.sigma >= 0.0)) bad_params("field 'sigma' must be >= 0");
  if (cfg.batch < 1) bad_params("field 'batch' must be >= 1");
  ex.noise.sigma = cfg.sigma;
  ex.noise.batch = cfg.batch;
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) bad_params("field 'delta' must lie in (0, 1)");
  if (!(cfg.basin_radius > 0.0)) bad_params("field 'basin_radius' must be > 0");

  if (cfg.pi_star == "brute_force") {
    ex.pi_star = default_target(ex.game);
  } else if (cfg.pi_star.rfind("pure:", 0) == 0) {
    ex.pi_star = parse_pure(cfg.pi_star.substr(5), shape);
  } else if (cfg.pi_star != "none" && !cfg.pi_star.empty()) {
    ex.pi_star = load_policy(cfg.pi_star, shape);
  }

  std::string init = cfg.init;
  if (init.empty()) {
    init = !ex.pi_star ? "uniform" : ex.algo == Algorithm::kPG ? "near:0.2" : "lazy:1";
  }
  ex.init_spec = init;
  auto need_target = [&](const std::string& what) {
    if (!ex.pi_star) bad_params("field 'init' " + what + " needs a target (pi_star)");
  };
  if (init == "uniform") {
    ex.init = PolicyProfile::uniform(shape);
  } else if (init.rfind("near:", 0) == 0) {
    need_target("near:");
    ex.init = near_profile(*ex.pi_star, parse_number(init.substr(5), "init"));
  } else if (init.rfind("lazy:", 0) == 0) {
    need_target("lazy:");
    if (!ex.pi_star->is_deterministic()) {
      throw Error(ErrorCode::kNotDeterministicTarget, "field 'init' lazy: needs a vertex target");
    }
    ex.lazy_margin = parse_number(init.substr(5), "init");
    if (!(ex.lazy_margin > 0.0)) bad_params("field 'init' lazy margin must be > 0");
    ex.init = lazy_basin_scores(*ex.pi_star, ex.lazy_margin);
  } else if (init.rfind("file:", 0) == 0) {
    ex.init = load_policy(init.substr(5), shape);
  } else {
    bad_params("field 'init' must be uniform, near:R, lazy:M or file:PATH");
  }
  return ex;
}

RunLog run_one(const Experiment& ex, RngState rng) {
  RunOptions options;
  options.noise = ex.noise;
  options.fos_every = ex.fos_every;
  options.game_label = ex.game_label;
  return run_experiment(ex.game, ex.algo, ex.sched, ex.init, ex.horizon, ex.pi_star, rng,
                        options);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Policy-gradient learning in stochastic games with random stopping", "sgpg"};
  app.require_subcommand(1);

  std::string validate_game_spec;
  auto* validate = app.add_subcommand("validate", "Validate a game and print its shape");
  validate->add_option("--game", validate_game_spec, "Game file or builtin:NAME")->required();

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Classify a policy or enumerate deterministic Nash");
  analyze->add_option("--game", analyze_args.game, "Game file or builtin:NAME")->required();
  analyze->add_option("--policy", analyze_args.policy, "Policy JSON file");
  analyze->add_flag("--brute-force", analyze_args.brute_force,
                    "Enumerate deterministic Nash profiles");
  analyze->add_option("--tol", analyze_args.tol, "Residual tolerance")->capture_default_str();
  analyze->add_option("--out", analyze_args.out, "Report file (default stdout)");

  ExperimentConfig run_cfg;
  std::string run_window;
  auto* run = app.add_subcommand("run", "Run PG or LPG for one or more seeds");
  add_experiment_flags(run, run_cfg, run_window);

  std::string sweep_config;
  std::string sweep_out;
  bool sweep_timing = false;
  auto* sweep = app.add_subcommand("sweep", "Run the cross product of a sweep config");
  sweep->add_option("--config", sweep_config, "Sweep config JSON")->required();
  sweep->add_option("--out", sweep_out, "Output directory (overrides the config)");
  sweep->add_flag("--timing", sweep_timing, "Include wall time in sidecars");

  EstimatorArgs est;
  auto* stats = app.add_subcommand("estimator-stats",
                                   "Monte-Carlo moments of a gradient signal against the exact gradient");
  stats->add_option("--game", est.game, "Game file or builtin:NAME")->capture_default_str();
  stats->add_option("--policy", est.policy, "Policy JSON file (default uniform)");
  stats->add_option("--model", est.model, "Feedback model")
      ->check(CLI::IsMember({"full", "stochastic", "value_based"}))
      ->capture_default_str();
  stats->add_option("--eps", est.eps, "Exploration rate for value_based")->capture_default_str();
  stats->add_option("--noise", est.noise, "Noise law for stochastic")
      ->check(CLI::IsMember({"uniform", "gaussian"}))
      ->capture_default_str();
  stats->add_option("--sigma", est.sigma, "Noise scale for stochastic")->capture_default_str();
  stats->add_option("--episodes", est.episodes, "Number of draws")->capture_default_str();
  stats->add_option("--master-seed,--seed", est.seed, "Seed")->capture_default_str();
  stats->add_option("--out", est.out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    json doc;
    doc["error"] = std::string(to_string(ErrorCode::kBadParams));
    doc["message"] = e.what();
    doc["exit_code"] = kExitConfig;
    err << doc.dump() << "\n";
    return kExitConfig;
  }

  try {
    if (*validate) return cmd_validate(validate_game_spec, out);
    if (*analyze) return cmd_analyze(analyze_args, out);
    if (*run) {
      if (!run_window.empty()) run_cfg.window = parse_window(run_window);
      return cmd_run(run_cfg, out, err);
    }
    if (*sweep) return cmd_sweep(sweep_config, sweep_out, sweep_timing, out, err);
    if (*stats) return cmd_estimator_stats(est, out);
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const std::exception& e) {
    json doc;
    doc["error"] = "INTERNAL";
    doc["message"] = e.what();
    doc["exit_code"] = kExitRuntime;
    err << doc.dump() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace sgpg::cli
