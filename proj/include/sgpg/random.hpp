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

#ifndef SGPG_RANDOM_HPP_
#define SGPG_RANDOM_HPP_

#include <cstdint>
#include <random>

#include "sgpg/core.hpp"

namespace sgpg {

// Identifies an independent random stream. Runs in a sweep use
// (master seed, run index) so results do not depend on execution order.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

// mt19937_64 keyed by std::seed_seq over (seed, stream). Both are fully
// specified by the standard, and uniform() maps the top 53 bits directly,
// so draws are identical across platforms.
class Rng {
 public:
  explicit Rng(RngState state = {});

  const RngState& state() const { return state_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }
  // Uniform on [0, 1).
  Scalar uniform() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }
  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }
  // Exponential(1).
  Scalar exponential();
  // Index drawn from nonnegative weights that sum to `total`.
  template <typename Derived>
  int categorical(const Eigen::MatrixBase<Derived>& probs, Scalar total = 1.0) {
    const Scalar u = uniform() * total;
    Scalar acc = 0.0;
    const int n = static_cast<int>(probs.size());
    int last_positive = 0;
    for (int k = 0; k < n; ++k) {
      if (probs[k] > 0.0) last_positive = k;
      acc += probs[k];
      if (u < acc && probs[k] > 0.0) return k;
    }
    return last_positive;
  }

 private:
  RngState state_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

}  // namespace sgpg

#endif  // SGPG_RANDOM_HPP_
