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
#include <numeric>

#include "qfs/errors.hpp"
#include "qfs/random.hpp"
#include "qfs/solve.hpp"

namespace qfs {
namespace {

std::vector<double> local_fields(const QuboModel& q, const Adjacency& adj, const BitVector& x) {
  std::vector<double> field(q.diagonal().begin(), q.diagonal().end());
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i])
      for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
        field[adj.neighbors[e]] += adj.weights[e];
  return field;
}

SampleSet solve_inner(const QuboModel& sub, const PartitionParams& p, std::uint64_t seed,
                      const BitVector& current) {
  switch (p.inner) {
    case InnerSolver::Exhaustive:
      return exhaustive(sub);
    case InnerSolver::Tabu: {
      TabuParams tp;
      tp.iters = p.inner_tabu_iters;
      tp.tenure = std::max<std::size_t>(1, sub.size() / 4);
      tp.seed = seed;
      tp.start = current;
      return tabu(sub, tp);
    }
    case InnerSolver::Anneal: {
      AnnealParams ap;
      ap.reads = 20;
      ap.sweeps = 200;
      ap.seed = seed;
      return simulated_anneal(sub, ap);
    }
  }
  throw ConsistencyError("unknown inner solver");
}

}  // namespace

QuboModel clamp_subproblem(const QuboModel& q, const Adjacency& adj, const BitVector& x,
                           const std::vector<std::size_t>& vars) {
  const std::size_t n = q.size();
  std::vector<std::size_t> local(n, n);
  for (std::size_t a = 0; a < vars.size(); ++a) local[vars[a]] = a;

  QuboModel sub(vars.size());
  BitVector cleared = x;
  for (auto v : vars) cleared[v] = 0;
  sub.set_offset(q.energy(cleared));
  for (std::size_t a = 0; a < vars.size(); ++a) {
    const std::size_t i = vars[a];
    double lin = q.linear(i);
    for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e) {
      const std::size_t j = adj.neighbors[e];
      if (local[j] == n) {
        if (x[j]) lin += adj.weights[e];
      } else if (local[j] > a) {
        sub.set_coupling(a, local[j], adj.weights[e]);
      }
    }
    sub.set_linear(a, lin);
  }
  return sub;
}

SampleSet partitioned_solve(const QuboModel& q, const PartitionParams& p) {
  const std::size_t n = q.size();
  if (p.subproblem_size < 1) throw ConsistencyError("subproblem size must be positive");
  if (p.inner == InnerSolver::Exhaustive && p.subproblem_size > kExhaustiveLimit)
    throw CapacityError("exhaustive inner solver is limited to 24 variables");

  SampleSet out("partitioned", p.seed);
  out.params()["subproblem_size"] = std::to_string(p.subproblem_size);
  if (n <= p.subproblem_size) {
    auto whole = solve_inner(q, p, derive_seed(p.seed, 0), BitVector(n, 0));
    for (const auto& r : whole.records()) out.add(r.x, r.energy, r.occurrences);
    return out;
  }

  const Adjacency adj(q);
  TabuParams start;
  start.iters = p.initial_tabu_iters > 0 ? p.initial_tabu_iters : 20 * n;
  start.tenure = std::min<std::size_t>(20, n / 4 + 1);
  start.seed = derive_seed(p.seed, 0);
  BitVector x = best(tabu(q, start)).x;
  double energy = q.energy(x);

  std::size_t passes = 0;
  for (; passes < p.max_passes; ++passes) {
    bool improved = false;
    const auto field = local_fields(q, adj, x);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(field[a]) > std::abs(field[b]);
    });

    for (std::size_t begin = 0, chunk = 0; begin < n; begin += p.subproblem_size, ++chunk) {
      const std::size_t end = std::min(n, begin + p.subproblem_size);
      std::vector<std::size_t> vars(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                    order.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(vars.begin(), vars.end());
      const QuboModel sub = clamp_subproblem(q, adj, x, vars);
      BitVector current(vars.size());
      for (std::size_t a = 0; a < vars.size(); ++a) current[a] = x[vars[a]];
      const auto sub_best =
          best(solve_inner(sub, p, derive_seed(p.seed, (passes + 1) * n + chunk), current));
      if (sub_best.x == current) continue;

      BitVector candidate = x;
      for (std::size_t a = 0; a < vars.size(); ++a) candidate[vars[a]] = sub_best.x[a];
      const double e = q.energy(candidate);
      if (e < energy) {
        x = std::move(candidate);
        energy = e;
        improved = true;
      }
    }
    if (!improved) break;
  }

  out.add(x, energy);
  out.params()["passes"] = std::to_string(passes + 1);
  return out;
}

}  // namespace qfs
