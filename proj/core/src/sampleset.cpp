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
#include "qfs/solve.hpp"

#include <algorithm>
#include <ostream>

#include "qfs/errors.hpp"
#include "qfs/text.hpp"

namespace qfs {
namespace {

bool record_less(double ea, const BitVector& xa, double eb, const BitVector& xb) {
  if (ea != eb) return ea < eb;
  return xa < xb;
}

}  // namespace

void SampleSet::add(const BitVector& x, double energy, std::size_t count) {
  auto it = std::lower_bound(records_.begin(), records_.end(), 0, [&](const Sample& s, int) {
    return record_less(s.energy, s.x, energy, x);
  });
  if (it != records_.end() && it->energy == energy && it->x == x) {
    it->occurrences += count;
    return;
  }
  records_.insert(it, Sample{x, energy, count});
}

std::size_t SampleSet::total_occurrences() const {
  std::size_t total = 0;
  for (const auto& r : records_) total += r.occurrences;
  return total;
}

Sample best(const SampleSet& s) {
  if (s.empty()) throw EmptyError("sample set is empty");
  return s.records().front();
}

void write_sampleset_csv(std::ostream& out, const SampleSet& s) {
  out << "energy,occurrences,bitstring\n";
  for (const auto& r : s.records()) {
    out << format_double(r.energy) << ',' << r.occurrences << ',';
    for (auto b : r.x) out << (b ? '1' : '0');
    out << '\n';
  }
}

}  // namespace qfs
