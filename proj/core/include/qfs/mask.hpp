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
#include <span>
#include <string>
#include <vector>

namespace qfs {

/// Selected original feature indices plus the reduction steps behind them.
struct SelectionMask {
  std::size_t original_n = 0;
  std::vector<std::size_t> indices;  // strictly increasing, all < original_n
  std::vector<std::string> provenance;

  std::size_t size() const noexcept { return indices.size(); }

  /// Throws ConsistencyError / IndexError on broken invariants.
  void validate() const;

  bool operator==(const SelectionMask&) const = default;
};

/// Every index of an n-feature space.
SelectionMask identity_mask(std::size_t n);

/// Maps positions within `outer` (e.g. solver variables over a reduced
/// model) back to original indices.
SelectionMask compose(const SelectionMask& outer, std::span<const std::size_t> inner);

/// Indices i with x[i] set, mapped through `domain`.
SelectionMask mask_from_bits(const SelectionMask& domain, std::span<const std::uint8_t> x,
                             const std::string& step);

/// k distinct uniformly drawn indices, sorted.
SelectionMask random_mask(std::size_t n, std::size_t k, std::uint64_t seed);

/// r x r lattice (k = r^2) at rows/cols floor((i + 0.5) W / r).
SelectionMask grid_mask(std::size_t width, std::size_t k);

/// One index per line; '#' lines carry 'original_n <n>' and 'step <name>'.
void write_mask(std::ostream& out, const SelectionMask& m);
SelectionMask read_mask(std::istream& in);
void save_mask(const SelectionMask& m, const std::filesystem::path& path);
SelectionMask load_mask(const std::filesystem::path& path);

}  // namespace qfs
