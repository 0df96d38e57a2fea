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
#include <bit>
#include <cmath>
#include <cstdint>

#include "qfs/errors.hpp"
#include "qfs/solve.hpp"

namespace qfs {
namespace {

// Lexicographic order on bit vectors where bit i of the word is x_i.
bool lex_less(std::uint32_t a, std::uint32_t b) {
  const std::uint32_t d = a ^ b;
  if (d == 0) return false;
  return ((a >> std::countr_zero(d)) & 1u) == 0;
}

BitVector unpack(std::uint32_t word, std::size_t n) {
  BitVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((word >> i) & 1u);
  return x;
}

}  // namespace

SampleSet exhaustive(const QuboModel& q) {
  const std::size_t n = q.size();
  if (n > kExhaustiveLimit) throw CapacityError("exhaustive search is limited to 24 variables");
  SampleSet out("exhaustive", 0);
  if (n == 0) {
    out.add({}, q.offset());
    return out;
  }

  std::vector<double> w(n * n, 0.0);
  double scale = std::abs(q.offset());
  for (const auto& [key, v] : q.couplings()) {
    w[key.first * n + key.second] = v;
    w[key.second * n + key.first] = v;
    scale += std::abs(v);
  }
  std::vector<double> field(q.diagonal().begin(), q.diagonal().end());
  for (double d : field) scale += std::abs(d);
  // Gray-code accumulation drifts by far less than this; anything inside the
  // band is settled on exactly recomputed energies.
  const double tol = 1e-10 * std::max(1.0, scale);

  std::uint32_t x = 0;
  double energy = q.offset();
  std::uint32_t best_x = 0;
  double best_e = energy;
  double best_exact = energy;

  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < states; ++t) {
    const int j = std::countr_zero(t);
    const bool was_set = (x >> j) & 1u;
    energy += was_set ? -field[j] : field[j];
    x ^= 1u << j;
    const double sign = was_set ? -1.0 : 1.0;
    const double* row = w.data() + static_cast<std::size_t>(j) * n;
    for (std::size_t k = 0; k < n; ++k) field[k] += sign * row[k];

    if (energy < best_e - tol) {
      best_x = x;
      best_e = energy;
      best_exact = q.energy(unpack(x, n));
    } else if (energy <= best_e + tol) {
      const double exact = q.energy(unpack(x, n));
      if (exact < best_exact || (exact == best_exact && lex_less(x, best_x))) {
        best_x = x;
        best_e = energy;
        best_exact = exact;
      }
    }
  }
  out.add(unpack(best_x, n), best_exact);
  return out;
}

}  // namespace qfs
