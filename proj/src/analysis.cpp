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

#include "sgpg/analysis.hpp"

#include <cmath>
#include <limits>

#include "sgpg/exact.hpp"

namespace sgpg {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::kNotNash: return "not_nash";
    case Classification::kNash: return "nash";
    case Classification::kSosNash: return "sos_nash";
    case Classification::kStrictNash: return "strict_nash";
  }
  return "unknown";
}

EquilibriumReport classify_equilibrium(const GameSpec& game, const PolicyProfile& pi_star,
                                       Scalar tol) {
  const GameShape& shape = pi_star.shape();
  const Vector v = policy_gradient(game, pi_star).v;
  EquilibriumReport report;
  report.fos_residual = fos_residual(v, pi_star);
  report.is_nash = report.fos_residual <= tol;
  report.is_deterministic = pi_star.is_deterministic();

  bool all_strict = report.is_deterministic;
  if (report.is_deterministic) {
    const auto choices = pi_star.pure_choices();
    report.strict_gaps.resize(shape.num_players(), shape.num_states());
    for (int i = 0; i < shape.num_players(); ++i) {
      for (int s = 0; s < shape.num_states(); ++s) {
        const int star = choices[i][s];
        const Scalar v_star = v[shape.index(i, s, star)];
        Scalar gap = std::numeric_limits<Scalar>::infinity();
        for (int a = 0; a < shape.num_actions(i); ++a) {
          if (a != star) gap = std::min(gap, v_star - v[shape.index(i, s, a)]);
        }
        report.strict_gaps(i, s) = gap;
        if (!(gap > tol)) all_strict = false;
      }
    }
  }

  try {
    report.sos = sos_certificate(jacobian(game, pi_star), pi_star);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBoundaryPolicy) throw;
  }

  if (!report.is_nash) {
    report.classification = Classification::kNotNash;
  } else if (all_strict) {
    report.classification = Classification::kStrictNash;
  } else if (report.sos && report.sos->max_quad < 0.0) {
    report.classification = Classification::kSosNash;
  } else {
    report.classification = Classification::kNash;
  }
  return report;
}

namespace {

// Odometer over choices[i][s] for the given players.
bool advance(std::vector<std::vector<int>>& choices, const GameShape& shape,
             const std::vector<int>& players) {
  for (auto it = players.rbegin(); it != players.rend(); ++it) {
    const int i = *it;
    for (int s = shape.num_states() - 1; s >= 0; --s) {
      if (++choices[i][s] < shape.num_actions(i)) return true;
      choices[i][s] = 0;
    }
  }
  return false;
}

}  // namespace

std::vector<PolicyProfile> brute_force_deterministic_nash(const GameSpec& game, Scalar tol) {
  const GameShape shape = game.shape();
  const int n = shape.num_players();
  const int S = shape.num_states();
  double count = 1.0;
  for (int i = 0; i < n; ++i) count *= std::pow(static_cast<double>(shape.num_actions(i)), S);
  if (count > 1e6) {
    throw Error(ErrorCode::kTooLarge,
                "enumeration would visit " + std::to_string(count) + " profiles (limit 1e6)");
  }

  std::vector<int> everyone(n);
  for (int i = 0; i < n; ++i) everyone[i] = i;

  std::vector<PolicyProfile> found;
  std::vector<std::vector<int>> choices(n, std::vector<int>(S, 0));
  do {
    const PolicyProfile pi = PolicyProfile::deterministic(shape, choices);
    bool nash = true;
    for (int i = 0; i < n && nash; ++i) {
      const Scalar base = player_value(game, pi, i);
      auto deviation = choices;
      std::fill(deviation[i].begin(), deviation[i].end(), 0);
      do {
        if (deviation[i] == choices[i]) continue;
        const PolicyProfile other = PolicyProfile::deterministic(shape, deviation);
        if (player_value(game, other, i) > base + tol) {
          nash = false;
          break;
        }
      } while (advance(deviation, shape, {i}));
    }
    if (nash) found.push_back(pi);
  } while (advance(choices, shape, everyone));
  return found;
}

namespace {

RateFit fit_curve(const std::vector<Scalar>& mean, std::pair<long long, long long> window) {
  const auto [n_lo, n_hi] = window;
  if (n_lo < 1 || n_hi <= n_lo) {
    throw Error(ErrorCode::kInsufficientData, "window must satisfy 1 <= n_lo < n_hi");
  }
  if (static_cast<long long>(mean.size()) < n_hi) {
    throw Error(ErrorCode::kInsufficientData,
                "window ends at " + std::to_string(n_hi) + " but only " +
                    std::to_string(mean.size()) + " iterations are logged");
  }
  struct Bin {
    double sum_log_n = 0.0;
    double sum_value = 0.0;
    long long count = 0;
  };
  std::vector<Bin> bins;
  const double lo = static_cast<double>(n_lo);
  for (long long n = n_lo; n <= n_hi; ++n) {
    const double value = mean[static_cast<std::size_t>(n - 1)];
    if (!std::isfinite(value)) continue;
    const auto k = static_cast<std::size_t>(std::floor(10.0 * std::log10(n / lo) + 1e-12));
    if (bins.size() <= k) bins.resize(k + 1);
    bins[k].sum_log_n += std::log(static_cast<double>(n));
    bins[k].sum_value += value;
    ++bins[k].count;
  }
  std::vector<double> xs, ys;
  for (const Bin& bin : bins) {
    if (bin.count == 0 || !(bin.sum_value > 0.0)) continue;
    xs.push_back(bin.sum_log_n / bin.count);
    ys.push_back(std::log(bin.sum_value / bin.count));
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::kInsufficientData,
                "fewer than 3 log-spaced bins with positive mean distance");
  }
  const Eigen::Map<const Vector> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Vector> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const Scalar sxx = xc.squaredNorm();
  RateFit fit;
  fit.points = static_cast<int>(xs.size());
  fit.slope = xc.dot(yc) / sxx;
  fit.intercept = y.mean() - fit.slope * x.mean();
  const Scalar ssr = (yc - fit.slope * xc).squaredNorm();
  fit.std_err = std::sqrt(ssr / (fit.points - 2) / sxx);
  return fit;
}

}  // namespace

RateFit fit_rate(const std::vector<const RunLog*>& logs, std::pair<long long, long long> window,
                 std::optional<Scalar> basin_radius) {
  std::vector<Scalar> sum;
  std::vector<int> count;
  int used = 0;
  int excluded = 0;
  for (const RunLog* log : logs) {
    Scalar worst = 0.0;
    for (const RunRecord& r : log->records) {
      if (std::isfinite(r.dist_sq)) worst = std::max(worst, r.dist_sq);
    }
    if (basin_radius && std::sqrt(worst) > *basin_radius) {
      ++excluded;
      continue;
    }
    ++used;
    for (const RunRecord& r : log->records) {
      if (r.n < 1 || !std::isfinite(r.dist_sq)) continue;
      const auto k = static_cast<std::size_t>(r.n - 1);
      if (sum.size() <= k) {
        sum.resize(k + 1, 0.0);
        count.resize(k + 1, 0);
      }
      sum[k] += r.dist_sq;
      ++count[k];
    }
  }
  if (used == 0) throw Error(ErrorCode::kInsufficientData, "no run stayed inside the basin");
  std::vector<Scalar> mean(sum.size(), std::numeric_limits<Scalar>::quiet_NaN());
  for (std::size_t k = 0; k < sum.size(); ++k) {
    if (count[k] > 0) mean[k] = sum[k] / count[k];
  }
  RateFit fit = fit_curve(mean, window);
  fit.runs_used = used;
  fit.runs_excluded = excluded;
  fit.exclusion_fraction = static_cast<Scalar>(excluded) / (used + excluded);
  return fit;
}

RateFit fit_rate(const RunLog& log, std::pair<long long, long long> window) {
  return fit_rate(std::vector<const RunLog*>{&log}, window);
}

RateFit fit_rate(const std::vector<Scalar>& dist_sq, std::pair<long long, long long> window) {
  RateFit fit = fit_curve(dist_sq, window);
  fit.runs_used = 1;
  return fit;
}

std::optional<long long> detect_finite_convergence(const RunLog& log,
                                                   const PolicyProfile& pi_star) {
  if (!pi_star.is_deterministic()) {
    throw Error(ErrorCode::kNotDeterministicTarget, "finite convergence needs a vertex target");
  }
  const bool use_policies = log.policies.size() == log.records.size() && !log.policies.empty();
  if (!use_policies && !(log.pi_star && *log.pi_star == pi_star)) {
    throw Error(ErrorCode::kBadParams,
                "log neither keeps policies nor tracks this target");
  }
  std::optional<long long> n0;
  for (std::size_t k = log.records.size(); k-- > 0;) {
    const bool hit = use_policies ? log.policies[k] == pi_star.flat() : log.records[k].exact_hit;
    if (!hit) break;
    n0 = log.records[k].n;
  }
  return n0;
}

Scalar finite_time_scale(Scalar margin, int num_states, int total_actions, Scalar gap,
                         Scalar gamma, Scalar p) {
  if (p >= 1.0) return std::numeric_limits<Scalar>::infinity();
  return std::pow(margin * num_states * total_actions / (gap * gamma), 1.0 / (1.0 - p));
}

}  // namespace sgpg
