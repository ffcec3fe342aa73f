/*
 * Copyright 2026 The cosi Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef COSI_RUNNER_HPP
#define COSI_RUNNER_HPP

#include "cosi/report.hpp"
#include "cosi/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cosi {

struct CheckResult {
  CheckReport report;
  double seconds = 0.0;
};

struct RunReport {
  std::string scenario;
  std::string source;
  std::string digest;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  /// 0 when every check passed, 1 when any failed, otherwise 2 if any was inconclusive.
  int exit_code() const;
};

const char* tool_version();

/// Runs every check on `jobs` worker threads (0 selects the hardware
/// concurrency). Exceptions inside a check become inconclusive reports.
RunReport run_scenario(const Scenario& scenario, unsigned jobs = 0,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Header: scenario,check,verdict,constant_name,value,tolerance,seed.
std::string format_table(const RunReport& report);

/// Key/value tree as JSON with sorted keys.
std::string format_tree(const RunReport& report);

struct OutputFormats {
  bool tree = true;
  bool table = true;
};

/// Writes <dir>/<scenario>.json and <dir>/<scenario>.csv; returns the paths written.
std::vector<std::string> emit_report(const RunReport& report, const std::string& dir, const OutputFormats& formats);

/// "%.17g", with inf/-inf/nan spelled out.
std::string format_number(double v);

}  // namespace cosi

#endif  // COSI_RUNNER_HPP
