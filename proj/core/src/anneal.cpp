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
#include <map>
#include <random>
#include <thread>

#include "qfs/errors.hpp"
#include "qfs/random.hpp"
#include "qfs/solve.hpp"
#include "qfs/text.hpp"

namespace qfs {

void AnnealParams::validate() const {
  if (reads < 1) throw ConsistencyError("anneal needs at least one read");
  if (sweeps < 1) throw ConsistencyError("anneal needs at least one sweep");
  if (t_hot && t_cold && !(*t_hot > *t_cold)) throw ConsistencyError("t_hot must exceed t_cold");
  if (t_cold && !(*t_cold > 0.0)) throw ConsistencyError("t_cold must be positive");
}

std::pair<double, double> anneal_temperatures(const QuboModel& q, const AnnealParams& p) {
  double hot = 0.0;
  if (p.t_hot) {
    hot = *p.t_hot;
  } else {
    for (double d : q.diagonal()) hot = std::max(hot, std::abs(d));
    if (hot == 0.0)
      for (const auto& [key, v] : q.couplings()) hot = std::max(hot, std::abs(v));
    if (hot == 0.0) hot = 1.0;
  }
  const double cold = p.t_cold ? *p.t_cold : 1e-3 * hot;
  return {hot, cold};
}

SampleSet simulated_anneal(const QuboModel& q, const AnnealParams& p) {
  p.validate();
  const std::size_t n = q.size();
  const Adjacency adj(q);
  const auto [hot, cold] = anneal_temperatures(q, p);
  if (!(hot > cold && cold > 0.0)) throw ConsistencyError("invalid anneal temperatures");

  std::vector<double> betas(p.sweeps);
  for (std::size_t s = 0; s < p.sweeps; ++s) {
    const double frac = p.sweeps == 1 ? 1.0 : static_cast<double>(s) / (p.sweeps - 1);
    betas[s] = 1.0 / (hot * std::pow(cold / hot, frac));
  }

  std::vector<BitVector> finals(p.reads);
  auto run_read = [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(p.seed, r));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    BitVector x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(rng() >> 63);
    std::vector<double> field(q.diagonal().begin(), q.diagonal().end());
    for (std::size_t i = 0; i < n; ++i)
      if (x[i])
        for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
          field[adj.neighbors[e]] += adj.weights[e];

    for (double beta : betas) {
      for (std::size_t i = 0; i < n; ++i) {
        const double delta = x[i] ? -field[i] : field[i];
        if (delta > 0.0) {
          const double z = beta * delta;
          if (z > 40.0 || uniform(rng) >= std::exp(-z)) continue;
        }
        x[i] ^= 1;
        const double sign = x[i] ? 1.0 : -1.0;
        for (std::size_t e = adj.offsets[i]; e < adj.offsets[i + 1]; ++e)
          field[adj.neighbors[e]] += sign * adj.weights[e];
      }
    }
    finals[r] = std::move(x);
  };

  const std::size_t workers = std::clamp<std::size_t>(p.workers, 1, p.reads);
  if (workers == 1) {
    for (std::size_t r = 0; r < p.reads; ++r) run_read(r);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < p.reads; r += workers) run_read(r);
      });
  }

  // Merge in read order; energies are recomputed from scratch once per state.
  std::map<BitVector, std::size_t> counts;
  for (const auto& x : finals) ++counts[x];
  SampleSet out("simulated_anneal", p.seed);
  for (const auto& [x, c] : counts) out.add(x, q.energy(x), c);
  out.params()["reads"] = std::to_string(p.reads);
  out.params()["sweeps"] = std::to_string(p.sweeps);
  out.params()["t_hot"] = format_double(hot);
  out.params()["t_cold"] = format_double(cold);
  return out;
}

}  // namespace qfs
