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

#include "sgpg/core.hpp"

namespace sgpg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeProbability: return "NEGATIVE_PROBABILITY";
    case ErrorCode::kRowSumMismatch: return "ROW_SUM_MISMATCH";
    case ErrorCode::kZeroStopProbability: return "ZERO_STOP_PROBABILITY";
    case ErrorCode::kRewardOutOfRange: return "REWARD_OUT_OF_RANGE";
    case ErrorCode::kEmptySupportInitialDist: return "EMPTY_SUPPORT_INITIAL_DIST";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kNonFiniteInput: return "NON_FINITE_INPUT";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kUnknownName: return "UNKNOWN_NAME";
    case ErrorCode::kBadParams: return "BAD_PARAMS";
    case ErrorCode::kSingularSystem: return "SINGULAR_SYSTEM";
    case ErrorCode::kBoundaryPolicy: return "BOUNDARY_POLICY";
    case ErrorCode::kInfeasiblePolicy: return "INFEASIBLE_POLICY";
    case ErrorCode::kMaxLengthExceeded: return "MAX_LENGTH_EXCEEDED";
    case ErrorCode::kZeroProbabilityAction: return "ZERO_PROBABILITY_ACTION";
    case ErrorCode::kEpsOutOfRange: return "EPS_OUT_OF_RANGE";
    case ErrorCode::kNonFiniteSignal: return "NON_FINITE_SIGNAL";
    case ErrorCode::kInadmissibleSchedule: return "INADMISSIBLE_SCHEDULE";
    case ErrorCode::kTooLarge: return "TOO_LARGE";
    case ErrorCode::kInsufficientData: return "INSUFFICIENT_DATA";
    case ErrorCode::kNotDeterministicTarget: return "NOT_DETERMINISTIC_TARGET";
    case ErrorCode::kInvariantBreach: return "INVARIANT_BREACH";
    case ErrorCode::kIoError: return "IO_ERROR";
  }
  return "UNKNOWN";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularSystem:
    case ErrorCode::kMaxLengthExceeded:
    case ErrorCode::kNonFiniteSignal:
    case ErrorCode::kInvariantBreach:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

namespace {

std::string join_issues(const std::vector<Issue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(issue.code)) + " (" + issue.message + ")";
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error(issues.empty() ? ErrorCode::kBadParams : issues.front().code,
            join_issues(issues)),
      issues_(std::move(issues)) {}

}  // namespace sgpg
