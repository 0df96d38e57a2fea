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
#include <iosfwd>
#include <utility>
#include <vector>

#include "qfs/mask.hpp"
#include "qfs/mi.hpp"
#include "qfs/qubo.hpp"

namespace qfs {

/// Keeps the highest-importance pixel of every disjoint 2x2 block (row-major
/// blocks, ties to the lowest linear index). Width must be even.
SelectionMask subsample_2x2(const ImportanceVector& importance, std::size_t width);

/// Importance and redundancy over the mask's indices, in mask order.
std::pair<ImportanceVector, RedundancyMatrix> restrict_terms(const ImportanceVector& importance,
                                                             const RedundancyMatrix& redundancy,
                                                             const SelectionMask& mask);

/// Keeps the `keep` couplings of largest magnitude (ties in (i,j) order).
QuboModel threshold_couplings(const QuboModel& q, std::size_t keep);

struct DegreeReport {
  std::size_t num_vars = 0;
  std::size_t num_couplings = 0;
  std::size_t max_degree = 0;
  double mean_degree = 0.0;
  std::vector<std::size_t> histogram;  // histogram[d] = vars with degree d
};

DegreeReport degree_report(const QuboModel& q);

void print_degree_report(std::ostream& out, const DegreeReport& r);

}  // namespace qfs
