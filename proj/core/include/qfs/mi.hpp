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
#include <span>
#include <vector>

#include "qfs/ingest.hpp"

namespace qfs {

/// I(x_i; y) per feature, in nats.
struct ImportanceVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Symmetric pairwise feature MI in nats; the diagonal holds H(x_i).
class RedundancyMatrix {
 public:
  RedundancyMatrix() = default;
  explicit RedundancyMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  /// Writes both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

  bool operator==(const RedundancyMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

/// Joint counts of two discrete columns (rows x cols cells).
struct PairHistogram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> counts;
  std::size_t total = 0;

  std::uint32_t at(std::size_t a, std::size_t b) const { return counts[a * cols + b]; }
};

PairHistogram pair_histogram(std::span<const std::uint8_t> a, std::size_t a_levels,
                             std::span<const std::uint8_t> b, std::size_t b_levels);

/// Label histogram paired with one feature column.
PairHistogram feature_label_histogram(const DiscretizedDataset& dd, std::size_t feature);

/// Normalized joint table p(a,b) = count / total.
std::vector<double> joint_probabilities(const PairHistogram& h);

/// Plug-in mutual information of a joint histogram; 0 ln 0 := 0.
double plugin_mi(const PairHistogram& h);

/// Plug-in entropy of a count vector.
double plugin_entropy(std::span<const std::uint32_t> counts, std::size_t total);

ImportanceVector importance(const DiscretizedDataset& dd);

/// One direct histogram per unordered pair. Output does not depend on
/// `workers`; pairs are written exactly once and mirrored.
RedundancyMatrix redundancy(const DiscretizedDataset& dd, unsigned workers = 1);

/// Entropy of the label column, in nats.
double label_entropy(const DiscretizedDataset& dd);

/// Entropy of bin column i. Throws IndexError for i >= n.
double entropy(const DiscretizedDataset& dd, std::size_t i);

}  // namespace qfs
