// Copyright 2026 The qfs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qfs {

struct RunResult {
  std::string method;
  std::uint64_t seed = 0;
  double test_mse = 0.0;
  double wall_time_s = 0.0;
};

struct MetricsReport {
  std::string method;
  std::vector<RunResult> runs;  // repeat order
  double mean = 0.0;
  double std = 0.0;  // sample (n-1) convention, 0 for a single run

  std::size_t repeats() const noexcept { return runs.size(); }
};

/// Throws EmptyError when runs is empty.
MetricsReport summarize(std::vector<RunResult> runs);

/// One decimal place after scaling by 1e3, e.g. 0.0053 -> "5.3".
std::string format_milli(double v);

/// "mean ± std" in units of 1e-3.
std::string summary_line(const MetricsReport& r);

/// Header: method,seed,test_mse,wall_time_s
void write_report_csv(std::ostream& out, const std::vector<RunResult>& runs);
std::vector<RunResult> read_report_csv(std::istream& in);
std::vector<RunResult> load_report_csv(const std::filesystem::path& path);

/// Groups runs by method in first-seen order.
std::vector<MetricsReport> summarize_by_method(const std::vector<RunResult>& runs);

}  // namespace qfs
