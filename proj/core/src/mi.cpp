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
#include "qfs/mi.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qfs/errors.hpp"

namespace qfs {
namespace {

// ln(c) for integer counts 0..N; entry 0 is never read.
std::vector<double> log_table(std::size_t n) {
  std::vector<double> t(n + 1, 0.0);
  for (std::size_t c = 1; c <= n; ++c) t[c] = std::log(static_cast<double>(c));
  return t;
}

// MI from counts: sum c/N * (ln c + ln N - ln ca - ln cb).
double mi_from_counts(const std::uint32_t* joint, std::size_t rows, std::size_t cols,
                      const std::uint32_t* row_counts, const std::uint32_t* col_counts,
                      std::size_t total, const std::vector<double>& logs) {
  const double log_n = logs[total];
  double acc = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    if (row_counts[a] == 0) continue;
    const double base = log_n - logs[row_counts[a]];
    for (std::size_t b = 0; b < cols; ++b) {
      const std::uint32_t c = joint[a * cols + b];
      if (c == 0) continue;
      acc += static_cast<double>(c) * (logs[c] + base - logs[col_counts[b]]);
    }
  }
  // Exact independence can round to a tiny negative value.
  return std::max(0.0, acc / static_cast<double>(total));
}

std::size_t levels_of(std::span<const std::uint8_t> column) {
  std::size_t m = 0;
  for (auto v : column) m = std::max<std::size_t>(m, v);
  return m + 1;
}

}  // namespace

PairHistogram pair_histogram(std::span<const std::uint8_t> a, std::size_t a_levels,
                             std::span<const std::uint8_t> b, std::size_t b_levels) {
  if (a.size() != b.size()) throw ConsistencyError("histogram columns differ in length");
  PairHistogram h;
  h.rows = a_levels;
  h.cols = b_levels;
  h.total = a.size();
  h.counts.assign(a_levels * b_levels, 0);
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s] >= a_levels || b[s] >= b_levels) throw IndexError("bin index exceeds level count");
    ++h.counts[a[s] * b_levels + b[s]];
  }
  return h;
}

PairHistogram feature_label_histogram(const DiscretizedDataset& dd, std::size_t feature) {
  if (feature >= dd.num_features) throw IndexError("feature index out of range");
  PairHistogram h;
  h.rows = dd.effective_bins(feature);
  h.cols = dd.num_classes;
  h.total = dd.num_samples;
  h.counts.assign(h.rows * h.cols, 0);
  const auto col = dd.column(feature);
  for (std::size_t s = 0; s < dd.num_samples; ++s) ++h.counts[col[s] * h.cols + dd.labels[s]];
  return h;
}

std::vector<double> joint_probabilities(const PairHistogram& h) {
  std::vector<double> p(h.counts.size());
  const double inv = 1.0 / static_cast<double>(h.total);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = h.counts[i] * inv;
  return p;
}

double plugin_mi(const PairHistogram& h) {
  if (h.total == 0) return 0.0;
  std::vector<std::uint32_t> rows(h.rows, 0), cols(h.cols, 0);
  for (std::size_t a = 0; a < h.rows; ++a)
    for (std::size_t b = 0; b < h.cols; ++b) {
      rows[a] += h.at(a, b);
      cols[b] += h.at(a, b);
    }
  return mi_from_counts(h.counts.data(), h.rows, h.cols, rows.data(), cols.data(), h.total,
                        log_table(h.total));
}

double plugin_entropy(std::span<const std::uint32_t> counts, std::size_t total) {
  if (total == 0) return 0.0;
  double acc = 0.0;
  const double log_n = std::log(static_cast<double>(total));
  for (auto c : counts)
    if (c > 0) acc += static_cast<double>(c) * (log_n - std::log(static_cast<double>(c)));
  return acc / static_cast<double>(total);
}

ImportanceVector importance(const DiscretizedDataset& dd) {
  if (dd.num_samples == 0) throw EmptyError("importance needs at least one sample");
  ImportanceVector out;
  out.values.resize(dd.num_features);
  for (std::size_t f = 0; f < dd.num_features; ++f)
    out.values[f] = plugin_mi(feature_label_histogram(dd, f));
  return out;
}

double label_entropy(const DiscretizedDataset& dd) {
  std::vector<std::uint32_t> counts(dd.num_classes, 0);
  for (int y : dd.labels) ++counts[y];
  return plugin_entropy(counts, dd.num_samples);
}

double entropy(const DiscretizedDataset& dd, std::size_t i) {
  if (i >= dd.num_features) throw IndexError("feature index out of range");
  const auto col = dd.column(i);
  std::vector<std::uint32_t> counts(levels_of(col), 0);
  for (auto v : col) ++counts[v];
  return plugin_entropy(counts, dd.num_samples);
}

RedundancyMatrix redundancy(const DiscretizedDataset& dd, unsigned workers) {
  if (dd.num_samples == 0) throw EmptyError("redundancy needs at least one sample");
  const std::size_t n = dd.num_features;
  const std::size_t N = dd.num_samples;
  RedundancyMatrix out(n);
  const auto logs = log_table(N);

  // Levels and marginal counts are shared read-only by all workers.
  std::vector<std::size_t> levels(n);
  std::vector<std::vector<std::uint32_t>> marginals(n);
  std::size_t stride = 1;
  for (std::size_t f = 0; f < n; ++f) {
    levels[f] = levels_of(dd.column(f));
    stride = std::max(stride, levels[f]);
    marginals[f].assign(levels[f], 0);
    for (auto v : dd.column(f)) ++marginals[f][v];
  }
  for (std::size_t f = 0; f < n; ++f) out.set(f, f, plugin_entropy(marginals[f], N));

  // Cells of column j at or beyond levels[j] stay zero, so marginals[j] is
  // never indexed past its end. Each (i,j) is owned by exactly one worker.
  auto work_rows = [&](std::size_t worker, std::size_t num_workers) {
    std::vector<std::uint32_t> joint(stride * stride);
    std::vector<std::uint16_t> scaled(N);
    for (std::size_t i = worker; i < n; i += num_workers) {
      const auto ci = dd.column(i);
      for (std::size_t s = 0; s < N; ++s) scaled[s] = static_cast<std::uint16_t>(ci[s] * stride);
      for (std::size_t j = i + 1; j < n; ++j) {
        std::fill(joint.begin(), joint.end(), 0u);
        const auto cj = dd.column(j);
        for (std::size_t s = 0; s < N; ++s) ++joint[scaled[s] + cj[s]];
        out.set(i, j, mi_from_counts(joint.data(), levels[i], stride, marginals[i].data(),
                                     marginals[j].data(), N, logs));
      }
    }
  };

  const std::size_t num_workers = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
  if (num_workers == 1) {
    work_rows(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < num_workers; ++w) pool.emplace_back(work_rows, w, num_workers);
  }
  return out;
}

}  // namespace qfs
