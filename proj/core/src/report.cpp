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
#include "qfs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "qfs/errors.hpp"
#include "qfs/text.hpp"

namespace qfs {

MetricsReport summarize(std::vector<RunResult> runs) {
  if (runs.empty()) throw EmptyError("no runs to summarize");
  MetricsReport r;
  r.method = runs.front().method;
  r.runs = std::move(runs);
  const double n = static_cast<double>(r.runs.size());
  double sum = 0.0;
  for (const auto& run : r.runs) sum += run.test_mse;
  r.mean = sum / n;
  if (r.runs.size() > 1) {
    double ss = 0.0;
    for (const auto& run : r.runs) ss += (run.test_mse - r.mean) * (run.test_mse - r.mean);
    r.std = std::sqrt(ss / (n - 1.0));
  }
  return r;
}

std::string format_milli(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f", v * 1e3);
  return buf;
}

std::string summary_line(const MetricsReport& r) {
  return r.method + ": " + format_milli(r.mean) + " ± " + format_milli(r.std) +
         " (x1e-3, n=" + std::to_string(r.repeats()) + ")";
}

void write_report_csv(std::ostream& out, const std::vector<RunResult>& runs) {
  out << "method,seed,test_mse,wall_time_s\n";
  for (const auto& r : runs)
    out << r.method << ',' << r.seed << ',' << format_double(r.test_mse) << ','
        << format_double(r.wall_time_s) << '\n';
}

std::vector<RunResult> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "method,seed,test_mse,wall_time_s")
    throw FormatError("report CSV header mismatch");
  std::vector<RunResult> runs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    for (auto comma = rest.find(','); comma != std::string_view::npos; comma = rest.find(',')) {
      cells.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    cells.push_back(rest);
    if (cells.size() != 4) throw FormatError("report row needs 4 cells: " + line);
    runs.push_back({std::string(cells[0]), parse_size(cells[1]), parse_double(cells[2]),
                    parse_double(cells[3])});
  }
  return runs;
}

std::vector<RunResult> load_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_report_csv(in);
}

std::vector<MetricsReport> summarize_by_method(const std::vector<RunResult>& runs) {
  std::vector<std::vector<RunResult>> groups;
  for (const auto& r : runs) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.front().method == r.method; });
    if (it == groups.end()) {
      groups.push_back({r});
    } else {
      it->push_back(r);
    }
  }
  std::vector<MetricsReport> out;
  for (auto& g : groups) out.push_back(summarize(std::move(g)));
  return out;
}

}  // namespace qfs
