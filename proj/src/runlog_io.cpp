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

#include "sgpg/runlog_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sgpg {

using nlohmann::json;

std::string format_scalar(Scalar x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string run_csv_text(const RunLog& log) {
  std::string out = "n,gamma_n,eps_n,dist_sq,energy,fos_residual,exact_hit\n";
  out.reserve(out.size() + log.records.size() * 64);
  for (const RunRecord& r : log.records) {
    out += std::to_string(r.n);
    out += ',';
    out += format_scalar(r.gamma_n);
    out += ',';
    out += format_scalar(r.eps_n);
    out += ',';
    out += format_scalar(r.dist_sq);
    out += ',';
    out += format_scalar(r.energy);
    out += ',';
    out += format_scalar(r.fos_residual);
    out += ',';
    out += r.exact_hit ? '1' : '0';
    out += '\n';
  }
  return out;
}

namespace {

json flat_json(const Vector& x) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) arr.push_back(x[k]);
  return arr;
}

json nested_policy(const PolicyProfile& pi) {
  const GameShape& shape = pi.shape();
  json players = json::array();
  for (int i = 0; i < shape.num_players(); ++i) {
    json states = json::array();
    for (int s = 0; s < shape.num_states(); ++s) states.push_back(flat_json(pi.block(i, s)));
    players.push_back(std::move(states));
  }
  return players;
}

[[noreturn]] void parse_fail(const std::string& message) {
  throw Error(ErrorCode::kParseError, message);
}

}  // namespace

std::string run_sidecar_text(const RunLog& log, bool with_timing) {
  json doc;
  doc["game"] = log.game_label;
  doc["algo"] = std::string(to_string(log.algo));
  doc["model"] = std::string(to_string(log.sched.model));
  doc["mode"] = std::string(to_string(log.sched.mode));
  doc["schedule"] = {{"gamma", log.sched.gamma}, {"m", log.sched.m},   {"p", log.sched.p},
                     {"eps0", log.sched.eps0},   {"r_exp", log.sched.r_exp}};
  doc["noise"] = {{"kind", log.noise.kind == NoiseKind::kUniform ? "uniform" : "gaussian"},
                  {"sigma", log.noise.sigma},
                  {"batch", log.noise.batch},
                  {"instrumented", log.noise.instrumented}};
  doc["horizon"] = log.horizon;
  doc["seed"] = log.rng.seed;
  doc["stream"] = log.rng.stream;
  doc["iterations_logged"] = log.records.size();
  doc["n0"] = log.n0 ? json(*log.n0) : json(nullptr);
  doc["failure"] = log.failure ? json(*log.failure) : json(nullptr);
  doc["pi_star"] = log.pi_star ? nested_policy(*log.pi_star) : json(nullptr);
  doc["final_policy"] = log.final_pi ? nested_policy(*log.final_pi) : json(nullptr);
  if (!log.records.empty() && std::isfinite(log.records.back().dist_sq)) {
    doc["last_dist_sq"] = log.records.back().dist_sq;
  }
  if (log.final_pi && log.pi_star) {
    doc["final_dist"] = (log.final_pi->flat() - log.pi_star->flat()).norm();
  }
  if (with_timing) doc["wall_seconds"] = log.wall_seconds;
  return doc.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

void write_run_files(const RunLog& log, const std::filesystem::path& csv_path,
                     const std::filesystem::path& sidecar_path, bool with_timing) {
  write_text_file(csv_path, run_csv_text(log));
  write_text_file(sidecar_path, run_sidecar_text(log, with_timing));
}

PolicyProfile policy_from_json_text(const std::string& text, const GameShape& shape) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("policy file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("policy file must hold an object");
  const int n = shape.num_players();
  const int S = shape.num_states();
  if (doc.contains("pure")) {
    const json& pure = doc["pure"];
    if (!pure.is_array() || static_cast<int>(pure.size()) != n) {
      parse_fail("field 'pure' must list one array per player");
    }
    std::vector<std::vector<int>> choices(n, std::vector<int>(S));
    for (int i = 0; i < n; ++i) {
      if (!pure[i].is_array() || static_cast<int>(pure[i].size()) != S) {
        parse_fail("field 'pure[" + std::to_string(i) + "]' must have one entry per state");
      }
      for (int s = 0; s < S; ++s) {
        const json& a = pure[i][s];
        if (!a.is_number_integer() || a.get<int>() < 0 || a.get<int>() >= shape.num_actions(i)) {
          parse_fail("field 'pure[" + std::to_string(i) + "][" + std::to_string(s) +
                     "]' must be an action index");
        }
        choices[i][s] = a.get<int>();
      }
    }
    return PolicyProfile::deterministic(shape, choices);
  }
  if (!doc.contains("policy")) parse_fail("missing field 'policy'");
  const json& pol = doc["policy"];
  if (!pol.is_array() || static_cast<int>(pol.size()) != n) {
    parse_fail("field 'policy' must list one entry per player");
  }
  Vector flat(shape.dim());
  for (int i = 0; i < n; ++i) {
    if (!pol[i].is_array() || static_cast<int>(pol[i].size()) != S) {
      parse_fail("field 'policy[" + std::to_string(i) + "]' must have one row per state");
    }
    for (int s = 0; s < S; ++s) {
      const json& row = pol[i][s];
      const std::string at = "policy[" + std::to_string(i) + "][" + std::to_string(s) + "]";
      if (!row.is_array() || static_cast<int>(row.size()) != shape.num_actions(i)) {
        parse_fail("field '" + at + "' must have one probability per action");
      }
      for (int a = 0; a < shape.num_actions(i); ++a) {
        if (!row[a].is_number()) parse_fail("field '" + at + "' must hold numbers");
        flat[shape.index(i, s, a)] = row[a].get<Scalar>();
      }
    }
  }
  return PolicyProfile::checked(shape, std::move(flat), 1e-9);
}

PolicyProfile load_policy(const std::filesystem::path& path, const GameShape& shape) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return policy_from_json_text(buffer.str(), shape);
}

std::string policy_to_json_text(const PolicyProfile& pi) {
  json doc;
  doc["policy"] = nested_policy(pi);
  return doc.dump(2) + "\n";
}

std::string report_to_json_text(const EquilibriumReport& report) {
  json doc;
  doc["classification"] = std::string(to_string(report.classification));
  doc["is_nash"] = report.is_nash;
  doc["fos_residual"] = report.fos_residual;
  doc["is_deterministic"] = report.is_deterministic;
  if (report.strict_gaps.size() > 0) {
    json gaps = json::array();
    for (Eigen::Index i = 0; i < report.strict_gaps.rows(); ++i) {
      gaps.push_back(flat_json(report.strict_gaps.row(i).transpose()));
    }
    doc["strict_gaps"] = std::move(gaps);
  } else {
    doc["strict_gaps"] = nullptr;
  }
  if (report.sos) {
    doc["sos"] = {{"max_quad", report.sos->max_quad},
                  {"mu_hat", report.sos->mu_hat},
                  {"directions", report.sos->directions}};
  } else {
    doc["sos"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

}  // namespace sgpg
