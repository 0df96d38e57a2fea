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
#include "qfs/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qfs/errors.hpp"

namespace qfs {

SelectionMask subsample_2x2(const ImportanceVector& importance, std::size_t width) {
  if (width % 2 != 0) throw ConsistencyError("2x2 subsampling needs an even width");
  if (importance.size() != width * width)
    throw ConsistencyError("importance length does not match width^2");
  SelectionMask m;
  m.original_n = width * width;
  for (std::size_t br = 0; br < width / 2; ++br) {
    for (std::size_t bc = 0; bc < width / 2; ++bc) {
      std::size_t best = (2 * br) * width + 2 * bc;
      for (std::size_t dr = 0; dr < 2; ++dr)
        for (std::size_t dc = 0; dc < 2; ++dc) {
          const std::size_t idx = (2 * br + dr) * width + 2 * bc + dc;
          if (importance[idx] > importance[best]) best = idx;
        }
      m.indices.push_back(best);
    }
  }
  // Block order is row-major but picks inside a block row are not globally
  // sorted across the two pixel rows, so sort once.
  std::sort(m.indices.begin(), m.indices.end());
  m.provenance = {"subsample_2x2"};
  return m;
}

std::pair<ImportanceVector, RedundancyMatrix> restrict_terms(const ImportanceVector& importance,
                                                             const RedundancyMatrix& redundancy,
                                                             const SelectionMask& mask) {
  if (importance.size() != redundancy.size())
    throw ConsistencyError("importance and redundancy dimensions differ");
  if (mask.original_n != importance.size())
    throw ConsistencyError("mask was built for a different feature count");
  mask.validate();
  const std::size_t m = mask.size();
  ImportanceVector sub_i;
  sub_i.values.resize(m);
  RedundancyMatrix sub_r(m);
  for (std::size_t a = 0; a < m; ++a) {
    sub_i.values[a] = importance[mask.indices[a]];
    for (std::size_t b = a; b < m; ++b)
      sub_r.set(a, b, redundancy(mask.indices[a], mask.indices[b]));
  }
  return {std::move(sub_i), std::move(sub_r)};
}

QuboModel threshold_couplings(const QuboModel& q, std::size_t keep) {
  if (q.num_couplings() <= keep) return q;
  std::vector<std::pair<VarPair, double>> entries(q.couplings().begin(), q.couplings().end());
  // Map order is already (i,j)-lexicographic, so a stable sort on magnitude
  // leaves ties in that order.
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  QuboModel out(q.size(), q.offset());
  for (std::size_t i = 0; i < q.size(); ++i) out.set_linear(i, q.linear(i));
  for (std::size_t e = 0; e < keep; ++e)
    out.set_coupling(entries[e].first.first, entries[e].first.second, entries[e].second);
  return out;
}

DegreeReport degree_report(const QuboModel& q) {
  DegreeReport r;
  r.num_vars = q.size();
  r.num_couplings = q.num_couplings();
  std::vector<std::size_t> degree(q.size(), 0);
  for (const auto& [key, v] : q.couplings()) {
    ++degree[key.first];
    ++degree[key.second];
  }
  for (auto d : degree) r.max_degree = std::max(r.max_degree, d);
  r.histogram.assign(r.max_degree + 1, 0);
  for (auto d : degree) ++r.histogram[d];
  r.mean_degree = q.size() == 0 ? 0.0 : 2.0 * static_cast<double>(r.num_couplings) / q.size();
  return r;
}

void print_degree_report(std::ostream& out, const DegreeReport& r) {
  out << "variables " << r.num_vars << "\n"
      << "couplings " << r.num_couplings << "\n"
      << "max_degree " << r.max_degree << "\n"
      << "mean_degree " << r.mean_degree << "\n";
  for (std::size_t d = 0; d < r.histogram.size(); ++d)
    if (r.histogram[d] > 0) out << "degree " << d << " count " << r.histogram[d] << "\n";
}

}  // namespace qfs
