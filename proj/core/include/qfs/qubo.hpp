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
#include <map>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "qfs/mi.hpp"

namespace qfs {

using BitVector = std::vector<std::uint8_t>;
using VarPair = std::pair<std::size_t, std::size_t>;

std::size_t hamming_weight(std::span<const std::uint8_t> x);

/// Upper-triangular QUBO: E(x) = offset + sum_i d_i x_i + sum_{i<j} Q_ij x_i x_j.
/// Coupling keys are canonicalized to i < j and zero values are never stored.
class QuboModel {
 public:
  QuboModel() = default;
  explicit QuboModel(std::size_t n, double offset = 0.0) : diag_(n, 0.0), offset_(offset) {}

  std::size_t size() const noexcept { return diag_.size(); }

  double offset() const noexcept { return offset_; }
  void set_offset(double v) { offset_ = v; }
  void add_offset(double v) { offset_ += v; }

  double linear(std::size_t i) const { return diag_.at(i); }
  void set_linear(std::size_t i, double v);
  void add_linear(std::size_t i, double v) { set_linear(i, linear(i) + v); }
  std::span<const double> diagonal() const noexcept { return diag_; }

  double coupling(std::size_t i, std::size_t j) const;
  void set_coupling(std::size_t i, std::size_t j, double v);
  void add_coupling(std::size_t i, std::size_t j, double v);
  const std::map<VarPair, double>& couplings() const noexcept { return couplings_; }
  std::size_t num_couplings() const noexcept { return couplings_.size(); }

  /// Throws ConsistencyError when |x| != n.
  double energy(std::span<const std::uint8_t> x) const;

  bool operator==(const QuboModel&) const = default;

 private:
  std::vector<double> diag_;
  std::map<VarPair, double> couplings_;
  double offset_ = 0.0;
};

/// Compressed neighbour lists of a QuboModel, the form the solvers iterate.
struct Adjacency {
  std::vector<std::size_t> offsets;  // size n + 1
  std::vector<std::uint32_t> neighbors;
  std::vector<double> weights;

  explicit Adjacency(const QuboModel& q);

  std::size_t degree(std::size_t i) const { return offsets[i + 1] - offsets[i]; }
};

/// Spins take values in {-1/2, +1/2}; x = mu + 1/2.
struct IsingModel {
  std::vector<double> h;
  std::map<VarPair, double> J;
  double offset = 0.0;

  std::size_t size() const noexcept { return h.size(); }
  double energy(std::span<const double> spins) const;
};

std::vector<double> spins_from_bits(std::span<const std::uint8_t> x);

IsingModel to_ising(const QuboModel& q);

struct NoConstraint {};

/// alpha * (sum x - k)^2
struct QuadraticConstraint {
  double alpha = 0.0;
  std::size_t k = 0;
};

/// alpha * sum x on the diagonal; k is the weight the tuner aims for.
struct LinearPenalty {
  double alpha = 0.0;
  std::size_t k = 0;
};

using ConstraintKind = std::variant<NoConstraint, QuadraticConstraint, LinearPenalty>;

/// Adds the constraint's diagonal, coupling and offset terms in place.
void apply_constraint(QuboModel& q, const ConstraintKind& c);

/// Q = -I + R (off-diagonal) + constraint.
QuboModel assemble(const ImportanceVector& importance, const RedundancyMatrix& redundancy,
                   const ConstraintKind& c);

/// Text format:
///   qubo <n> <offset>
///   d <i> <value>      (one per variable on write; missing lines read as 0)
///   c <i> <j> <value>  (i < j)
/// Lines starting with '#' are comments. Doubles use shortest round-trip form.
void write_qubo(std::ostream& out, const QuboModel& q);
QuboModel read_qubo(std::istream& in);
void save_qubo(const QuboModel& q, const std::filesystem::path& path);
QuboModel load_qubo(const std::filesystem::path& path);

}  // namespace qfs
