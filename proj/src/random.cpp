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

#include "sgpg/random.hpp"

#include <cmath>

namespace sgpg {

Rng::Rng(RngState state) : state_(state) {
  std::seed_seq seq{static_cast<std::uint32_t>(state.seed),
                    static_cast<std::uint32_t>(state.seed >> 32),
                    static_cast<std::uint32_t>(state.stream),
                    static_cast<std::uint32_t>(state.stream >> 32)};
  engine_.seed(seq);
}

Scalar Rng::exponential() { return -std::log1p(-uniform()); }

}  // namespace sgpg
