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
#include <span>
#include <vector>

namespace qfs {

/// N flattened square images with values in [0,1] and integer class labels.
struct ImageDataset {
  std::size_t num_samples = 0;
  std::size_t width = 0;
  std::size_t num_classes = 0;
  std::vector<float> features;  // row-major, num_samples x num_features()
  std::vector<int> labels;

  std::size_t num_features() const noexcept { return width * width; }

  std::span<const float> image(std::size_t s) const {
    return {features.data() + s * num_features(), num_features()};
  }

  /// Copies samples [first, first + count).
  ImageDataset slice(std::size_t first, std::size_t count) const;

  /// Throws ConsistencyError when an invariant is violated.
  void validate() const;
};

/// Reads an MNIST-style IDX pair (0x00000803 images, 0x00000801 labels).
ImageDataset load_idx(const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path);

/// Writes the dataset as an IDX pair, quantizing pixels to round(255 v).
void save_idx(const ImageDataset& ds, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path);

/// Parses an IDX image/label buffer pair that is already in memory.
ImageDataset parse_idx(std::span<const std::uint8_t> images,
                       std::span<const std::uint8_t> labels);

struct SynthSpec {
  std::size_t num_samples = 1000;
  std::size_t width = 8;
  std::size_t num_classes = 2;
  std::vector<std::size_t> informative_pixels;
  double noise_std = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Planted dataset: informative pixels carry clamp(label/(C-1) + noise),
/// every other pixel is i.i.d. uniform on [0,1]. Labels are uniform.
ImageDataset synth(const SynthSpec& spec);

/// Per-feature bin indices and the edges that produced them.
struct DiscretizedDataset {
  std::size_t num_samples = 0;
  std::size_t num_features = 0;
  std::size_t bin_count = 0;  // requested B
  std::vector<std::uint8_t> bins;            // feature-major: bins[f * N + s]
  std::vector<std::vector<double>> edges;    // strictly increasing per feature
  std::vector<int> labels;
  std::size_t num_classes = 0;

  std::span<const std::uint8_t> column(std::size_t f) const {
    return {bins.data() + f * num_samples, num_samples};
  }
  std::size_t effective_bins(std::size_t f) const { return edges[f].size() + 1; }
};

/// Type-7 (linear interpolation) quantiles at j/B for j = 1..B-1, with
/// duplicates and edges at or above the maximum removed.
std::vector<double> quantile_edges(std::span<const float> values, std::size_t bin_count);

/// Number of edges strictly below v: cells are (e_{j-1}, e_j].
std::size_t bin_of(std::span<const double> edges, double v);

/// Discretizes every feature with its own quantile edges. B must be in [2, 256].
DiscretizedDataset quantile_bins(const ImageDataset& ds, std::size_t bin_count);

/// Applies edges computed elsewhere (e.g. on the training split) to another dataset.
DiscretizedDataset apply_bins(const ImageDataset& ds,
                              const std::vector<std::vector<double>>& edges,
                              std::size_t bin_count);

}  // namespace qfs
