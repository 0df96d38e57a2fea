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
#include <cmath>
#include <limits>
#include <random>

#include "qfs/errors.hpp"
#include "qfs/random.hpp"
#include "qfs/solve.hpp"

namespace qfs {

SampleSet tabu(const QuboModel& q, const TabuParams& p) {
  if (p.iters < 1) throw ConsistencyError("tabu needs at least one iteration");
  const std::size_t n = q.size();
  BitVector x = p.start ? *p.start : BitVector(n, 0);
  if (x.size() != n) throw ConsistencyError("tabu start vector has the wrong length");

  SampleSet out("tabu", p.seed);
  out.params()["iters"] = std::to_string(p.iters);
  out.params()["tenure"] = std::to_string(p.tenure);
  if (n == 0) {
    out.add(x, q.energy(x));
    return out;
  }

  const Adjacency adj(q);
  std::vector<double> field(q.diagonal().begin(), q.diagonal().end());
  for (std::size_t i = 0; i < n; ++i)
    if (x[i])
      for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
        field[adj.neighbors[e]] += adj.weights[e];

  std::mt19937_64 rng(derive_seed(p.seed, 0x7ab0));
  double energy = q.energy(x);
  BitVector best_x = x;
  double best_e = energy;
  std::vector<std::size_t> tabu_until(n, 0);

  for (std::size_t it = 1; it <= p.iters; ++it) {
    std::size_t chosen = n;
    double chosen_delta = std::numeric_limits<double>::infinity();
    std::size_t ties = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double delta = x[i] ? -field[i] : field[i];
      const bool allowed = tabu_until[i] < it || energy + delta < best_e;
      if (!allowed) continue;
      if (delta < chosen_delta) {
        chosen = i;
        chosen_delta = delta;
        ties = 1;
      } else if (delta == chosen_delta) {
        // Reservoir sampling keeps each tied move equally likely.
        ++ties;
        if (std::uniform_int_distribution<std::size_t>(0, ties - 1)(rng) == 0) chosen = i;
      }
    }
    if (chosen == n) continue;  // every move tabu; wait for tenures to lapse

    x[chosen] ^= 1;
    energy += chosen_delta;
    const double sign = x[chosen] ? 1.0 : -1.0;
    for (std::size_t e = adj.offsets[chosen]; e < adj.offsets[chosen + 1]; ++e)
      field[adj.neighbors[e]] += sign * adj.weights[e];
    tabu_until[chosen] = it + p.tenure;
    if (energy < best_e) {
      best_e = energy;
      best_x = x;
    }
  }

  out.add(best_x, q.energy(best_x));
  if (x != best_x) out.add(x, q.energy(x));
  return out;
}

}  // namespace qfs
