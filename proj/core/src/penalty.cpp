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
#include <algorithm>
#include <cmath>
#include <limits>

#include "qfs/errors.hpp"
#include "qfs/solve.hpp"
#include "qfs/text.hpp"

namespace qfs {

double alpha_upper_bound(const QuboModel& base) {
  double max_gain = 0.0;
  for (double d : base.diagonal()) max_gain = std::max(max_gain, -d);
  std::vector<double> row_sum(base.size(), 0.0);
  for (const auto& [key, v] : base.couplings()) {
    row_sum[key.first] += std::abs(v);
    row_sum[key.second] += std::abs(v);
  }
  double max_row = 0.0;
  for (double r : row_sum) max_row = std::max(max_row, r);
  return max_gain + max_row;
}

TuneResult tune_alpha(const QuboModel& base, std::size_t k, const Solver& solver,
                      const TuneOptions& options) {
  if (k > base.size()) throw ConsistencyError("k exceeds variable count");
  const double alpha_max = options.alpha_max ? *options.alpha_max : alpha_upper_bound(base);

  TuneResult result;
  bool have_best = false;
  std::size_t best_gap = 0;
  double lo = 0.0;
  double hi = alpha_max;
  for (std::size_t step = 0; step < options.max_steps; ++step) {
    const double alpha = 0.5 * (lo + hi);
    QuboModel probe = base;
    apply_constraint(probe, LinearPenalty{alpha, k});
    SampleSet samples = solver(probe);
    const Sample& top = best(samples);
    const std::size_t w = hamming_weight(top.x);
    result.probes.push_back({alpha, w, top.energy});

    const std::size_t gap = w > k ? w - k : k - w;
    if (!have_best || gap < best_gap || (gap == best_gap && alpha < result.alpha)) {
      have_best = true;
      best_gap = gap;
      result.alpha = alpha;
      result.samples = std::move(samples);
    }
    if (w == k) break;
    if (w > k) {
      lo = alpha;
    } else {
      hi = alpha;
    }
  }
  if (!have_best) throw EmptyError("tuning made no probes");
  result.samples.params()["alpha_l"] = format_double(result.alpha);
  return result;
}

TuneResult tune_alpha(const ImportanceVector& importance, const RedundancyMatrix& redundancy,
                      std::size_t k, const Solver& solver, const TuneOptions& options) {
  return tune_alpha(assemble(importance, redundancy, NoConstraint{}), k, solver, options);
}

BitVector repair_weight(const QuboModel& base, BitVector x, std::size_t k) {
  const std::size_t n = base.size();
  if (x.size() != n) throw ConsistencyError("assignment length does not match QUBO size");
  if (k > n) throw ConsistencyError("k exceeds variable count");
  const Adjacency adj(base);
  std::vector<double> field(base.diagonal().begin(), base.diagonal().end());
  for (std::size_t i = 0; i < n; ++i)
    if (x[i])
      for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
        field[adj.neighbors[e]] += adj.weights[e];

  auto flip = [&](std::size_t i) {
    x[i] ^= 1;
    const double sign = x[i] ? 1.0 : -1.0;
    for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
      field[adj.neighbors[e]] += sign * adj.weights[e];
  };

  std::size_t w = hamming_weight(x);
  while (w > k) {
    std::size_t pick = n;
    double cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] && -field[i] < cost) {
        cost = -field[i];
        pick = i;
      }
    flip(pick);
    --w;
  }
  while (w < k) {
    std::size_t pick = n;
    double cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (!x[i] && field[i] < cost) {
        cost = field[i];
        pick = i;
      }
    flip(pick);
    ++w;
  }
  return x;
}

}  // namespace qfs
