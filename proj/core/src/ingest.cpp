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
#include "qfs/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "qfs/errors.hpp"

namespace qfs {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::span<const std::uint8_t> buf, std::size_t at) {
  if (at + 4 > buf.size()) throw IoError("IDX header truncated");
  return (std::uint32_t{buf[at]} << 24) | (std::uint32_t{buf[at + 1]} << 16) |
         (std::uint32_t{buf[at + 2]} << 8) | std::uint32_t{buf[at + 3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(bytes, 4);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

ImageDataset ImageDataset::slice(std::size_t first, std::size_t count) const {
  if (first + count > num_samples) throw IndexError("dataset slice out of range");
  ImageDataset out;
  out.num_samples = count;
  out.width = width;
  out.num_classes = num_classes;
  const auto n = num_features();
  out.features.assign(features.begin() + first * n, features.begin() + (first + count) * n);
  out.labels.assign(labels.begin() + first, labels.begin() + first + count);
  return out;
}

void ImageDataset::validate() const {
  if (num_samples < 1 || width < 1) throw ConsistencyError("dataset must be nonempty");
  if (features.size() != num_samples * num_features())
    throw ConsistencyError("feature matrix size does not match N x W^2");
  if (labels.size() != num_samples) throw ConsistencyError("label count does not match N");
  for (float v : features)
    if (!(v >= 0.0f && v <= 1.0f)) throw ConsistencyError("feature value outside [0,1]");
  for (int y : labels)
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
      throw ConsistencyError("label outside [0, num_classes)");
}

ImageDataset parse_idx(std::span<const std::uint8_t> images,
                       std::span<const std::uint8_t> labels) {
  if (read_be32(images, 0) != kImageMagic) throw FormatError("bad IDX image magic");
  if (read_be32(labels, 0) != kLabelMagic) throw FormatError("bad IDX label magic");
  const std::size_t n = read_be32(images, 4);
  const std::size_t rows = read_be32(images, 8);
  const std::size_t cols = read_be32(images, 12);
  const std::size_t n_labels = read_be32(labels, 4);
  if (n != n_labels) throw ConsistencyError("image and label counts differ");
  if (rows != cols) throw ConsistencyError("only square images are supported");
  const std::size_t pixels = rows * cols;
  if (images.size() < 16 + n * pixels) throw IoError("IDX image payload truncated");
  if (labels.size() < 8 + n) throw IoError("IDX label payload truncated");

  ImageDataset ds;
  ds.num_samples = n;
  ds.width = rows;
  ds.features.resize(n * pixels);
  for (std::size_t i = 0; i < n * pixels; ++i)
    ds.features[i] = static_cast<float>(images[16 + i]) / 255.0f;
  ds.labels.resize(n);
  int max_label = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = labels[8 + i];
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.num_classes = static_cast<std::size_t>(max_label) + 1;
  ds.validate();
  return ds;
}

ImageDataset load_idx(const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);
  return parse_idx(images, labels);
}

void save_idx(const ImageDataset& ds, const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path) {
  std::ofstream img(images_path, std::ios::binary);
  std::ofstream lab(labels_path, std::ios::binary);
  if (!img || !lab) throw IoError("cannot write IDX files");
  write_be32(img, kImageMagic);
  write_be32(img, static_cast<std::uint32_t>(ds.num_samples));
  write_be32(img, static_cast<std::uint32_t>(ds.width));
  write_be32(img, static_cast<std::uint32_t>(ds.width));
  for (float v : ds.features)
    img.put(static_cast<char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)));
  write_be32(lab, kLabelMagic);
  write_be32(lab, static_cast<std::uint32_t>(ds.num_samples));
  for (int y : ds.labels) lab.put(static_cast<char>(y));
  if (!img || !lab) throw IoError("short write on IDX files");
}

void SynthSpec::validate() const {
  if (num_samples < 1 || width < 1 || num_classes < 1)
    throw ConsistencyError("synth spec needs N, W, classes >= 1");
  if (!(noise_std >= 0.0)) throw ConsistencyError("noise_std must be >= 0");
  for (auto p : informative_pixels)
    if (p >= width * width) throw IndexError("informative pixel outside the image");
}

ImageDataset synth(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<int> label_dist(0, static_cast<int>(spec.num_classes) - 1);

  ImageDataset ds;
  ds.num_samples = spec.num_samples;
  ds.width = spec.width;
  ds.num_classes = spec.num_classes;
  const std::size_t n = ds.num_features();
  ds.features.resize(ds.num_samples * n);
  ds.labels.resize(ds.num_samples);

  std::vector<char> informative(n, 0);
  for (auto p : spec.informative_pixels) informative[p] = 1;
  const double scale = spec.num_classes > 1 ? 1.0 / static_cast<double>(spec.num_classes - 1) : 0.0;

  for (std::size_t s = 0; s < ds.num_samples; ++s) {
    const int y = label_dist(rng);
    ds.labels[s] = y;
    float* row = ds.features.data() + s * n;
    for (std::size_t f = 0; f < n; ++f) {
      double v;
      if (informative[f]) {
        v = y * scale + spec.noise_std * noise(rng);
      } else {
        v = uniform(rng);
      }
      row[f] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return ds;
}

std::vector<double> quantile_edges(std::span<const float> values, std::size_t bin_count) {
  if (values.empty()) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double max_value = sorted.back();
  const double last = static_cast<double>(sorted.size() - 1);

  std::vector<double> edges;
  edges.reserve(bin_count - 1);
  for (std::size_t j = 1; j < bin_count; ++j) {
    const double h = last * static_cast<double>(j) / static_cast<double>(bin_count);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double e = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    // An edge at the maximum would only open an empty top cell.
    if (e >= max_value) break;
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  return edges;
}

std::size_t bin_of(std::span<const double> edges, double v) {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

DiscretizedDataset apply_bins(const ImageDataset& ds,
                              const std::vector<std::vector<double>>& edges,
                              std::size_t bin_count) {
  const std::size_t n = ds.num_features();
  if (edges.size() != n) throw ConsistencyError("edge table does not match feature count");
  DiscretizedDataset dd;
  dd.num_samples = ds.num_samples;
  dd.num_features = n;
  dd.bin_count = bin_count;
  dd.edges = edges;
  dd.labels = ds.labels;
  dd.num_classes = ds.num_classes;
  dd.bins.resize(n * ds.num_samples);
  for (std::size_t f = 0; f < n; ++f) {
    auto* col = dd.bins.data() + f * ds.num_samples;
    for (std::size_t s = 0; s < ds.num_samples; ++s)
      col[s] = static_cast<std::uint8_t>(bin_of(edges[f], ds.features[s * n + f]));
  }
  return dd;
}

DiscretizedDataset quantile_bins(const ImageDataset& ds, std::size_t bin_count) {
  if (bin_count < 2 || bin_count > 256) throw ConsistencyError("bin count must be in [2, 256]");
  const std::size_t n = ds.num_features();
  std::vector<std::vector<double>> edges(n);
  std::vector<float> column(ds.num_samples);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t s = 0; s < ds.num_samples; ++s) column[s] = ds.features[s * n + f];
    edges[f] = quantile_edges(column, bin_count);
  }
  return apply_bins(ds, edges, bin_count);
}

}  // namespace qfs
