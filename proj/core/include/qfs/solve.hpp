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
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfs/mi.hpp"
#include "qfs/qubo.hpp"

namespace qfs {

struct Sample {
  BitVector x;
  double energy = 0.0;
  std::size_t occurrences = 1;
};

/// Solver outcomes sorted by ascending energy; equal energies are ordered by
/// lexicographically smaller bit vector.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::string solver, std::uint64_t seed) : solver_(std::move(solver)), seed_(seed) {}

  /// Adds `count` occurrences of x, merging with an existing record.
  void add(const BitVector& x, double energy, std::size_t count = 1);

  const std::vector<Sample>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t total_occurrences() const;

  const std::string& solver() const noexcept { return solver_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::map<std::string, std::string>& params() noexcept { return params_; }
  const std::map<std::string, std::string>& params() const noexcept { return params_; }

 private:
  std::vector<Sample> records_;
  std::string solver_;
  std::uint64_t seed_ = 0;
  std::map<std::string, std::string> params_;
};

/// Lowest-energy record. Throws EmptyError on an empty set.
Sample best(const SampleSet& s);

/// CSV columns energy,occurrences,bitstring (x_0 first).
void write_sampleset_csv(std::ostream& out, const SampleSet& s);

inline constexpr std::size_t kExhaustiveLimit = 24;

/// Global minimum by Gray-code enumeration; ties go to the lexicographically
/// smallest vector. Throws CapacityError above kExhaustiveLimit variables.
SampleSet exhaustive(const QuboModel& q);

struct AnnealParams {
  std::size_t reads = 1000;
  std::size_t sweeps = 2000;
  std::optional<double> t_hot;   // default: max |dE| of a single flip at x = 0
  std::optional<double> t_cold;  // default: 1e-3 * t_hot
  std::uint64_t seed = 0;
  unsigned workers = 1;

  void validate() const;
};

/// Single-flip Metropolis with a geometric temperature schedule. Read r draws
/// from derive_seed(seed, r), so the result is independent of `workers`.
SampleSet simulated_anneal(const QuboModel& q, const AnnealParams& p);

/// Temperatures used for q under p, after defaults are filled in.
std::pair<double, double> anneal_temperatures(const QuboModel& q, const AnnealParams& p);

struct TabuParams {
  std::size_t iters = 10000;
  std::size_t tenure = 20;
  std::uint64_t seed = 0;
  std::optional<BitVector> start;  // default: all zeros
};

/// Best-improvement single-flip tabu search with aspiration. Ties between
/// equally good moves are broken with the seeded generator.
SampleSet tabu(const QuboModel& q, const TabuParams& p);

enum class InnerSolver { Exhaustive, Tabu, Anneal };

struct PartitionParams {
  std::size_t subproblem_size = 20;
  InnerSolver inner = InnerSolver::Exhaustive;
  std::uint64_t seed = 0;
  std::size_t max_passes = 100;
  std::size_t initial_tabu_iters = 0;  // 0: 20 * n
  std::size_t inner_tabu_iters = 2000;
};

/// Large-neighbourhood search: order variables by flip impact, solve each
/// chunk of `subproblem_size` with the rest clamped, keep improvements, and
/// stop after a full pass without one.
SampleSet partitioned_solve(const QuboModel& q, const PartitionParams& p);

/// Sub-QUBO over `vars` with every other variable clamped to x.
QuboModel clamp_subproblem(const QuboModel& q, const Adjacency& adj, const BitVector& x,
                           const std::vector<std::size_t>& vars);

using Solver = std::function<SampleSet(const QuboModel&)>;

struct TuneProbe {
  double alpha = 0.0;
  std::size_t weight = 0;
  double energy = 0.0;
};

struct TuneResult {
  double alpha = 0.0;
  SampleSet samples;
  std::vector<TuneProbe> probes;
};

struct TuneOptions {
  std::size_t max_steps = 30;
  std::optional<double> alpha_max;  // default: alpha_upper_bound(base)
};

/// max_i (-d_i) + max_i sum_j |Q_ij|: every diagonal is nonnegative at this
/// penalty, so the empty selection is optimal.
double alpha_upper_bound(const QuboModel& base);

/// Bisection on the linear penalty weight so the best solution has weight k.
/// `base` carries no penalty; each probe adds alpha to every diagonal entry.
TuneResult tune_alpha(const QuboModel& base, std::size_t k, const Solver& solver,
                      const TuneOptions& options = {});

TuneResult tune_alpha(const ImportanceVector& importance, const RedundancyMatrix& redundancy,
                      std::size_t k, const Solver& solver, const TuneOptions& options = {});

/// Greedy add/remove on the penalty-free model until exactly k bits are set.
BitVector repair_weight(const QuboModel& base, BitVector x, std::size_t k);

}  // namespace qfs
