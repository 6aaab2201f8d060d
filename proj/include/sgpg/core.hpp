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

#ifndef SGPG_CORE_HPP_
#define SGPG_CORE_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sgpg {

using Scalar = double;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class ErrorCode {
  kNegativeProbability,
  kRowSumMismatch,
  kZeroStopProbability,
  kRewardOutOfRange,
  kEmptySupportInitialDist,
  kDimensionMismatch,
  kNonFiniteInput,
  kParseError,
  kUnknownName,
  kBadParams,
  kSingularSystem,
  kBoundaryPolicy,
  kInfeasiblePolicy,
  kMaxLengthExceeded,
  kZeroProbabilityAction,
  kEpsOutOfRange,
  kNonFiniteSignal,
  kInadmissibleSchedule,
  kTooLarge,
  kInsufficientData,
  kNotDeterministicTarget,
  kInvariantBreach,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Config-type errors map to CLI exit code 2, invariant breaches to 3.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Issue {
  ErrorCode code;
  std::string message;
};

// Raised by validate_game with every violated invariant, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  std::vector<Issue> issues_;
};

}  // namespace sgpg

#endif  // SGPG_CORE_HPP_
