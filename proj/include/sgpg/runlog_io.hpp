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

#ifndef SGPG_RUNLOG_IO_HPP_
#define SGPG_RUNLOG_IO_HPP_

#include <filesystem>
#include <string>

#include "sgpg/analysis.hpp"
#include "sgpg/learners.hpp"

namespace sgpg {

// Shortest round-trip decimal; "nan" and "inf"/"-inf" for non-finite values.
std::string format_scalar(Scalar x);

// Columns: n,gamma_n,eps_n,dist_sq,energy,fos_residual,exact_hit
std::string run_csv_text(const RunLog& log);
// Configuration echo, seed, n0, failure and final policy. Wall time is only
// included on request so that reruns are byte-identical.
std::string run_sidecar_text(const RunLog& log, bool with_timing = false);
void write_run_files(const RunLog& log, const std::filesystem::path& csv_path,
                     const std::filesystem::path& sidecar_path, bool with_timing = false);

// Policy files: {"policy": [[[p(a) for a] for s] for i]} or
// {"pure": [[a for s] for i]}.
PolicyProfile policy_from_json_text(const std::string& text, const GameShape& shape);
PolicyProfile load_policy(const std::filesystem::path& path, const GameShape& shape);
std::string policy_to_json_text(const PolicyProfile& pi);

std::string report_to_json_text(const EquilibriumReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace sgpg

#endif  // SGPG_RUNLOG_IO_HPP_
