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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qfs/errors.hpp"
#include "qfs/ingest.hpp"
#include "qfs/mi.hpp"
#include "support/oracles.hpp"

namespace qfs {
namespace {

void put_be32(std::vector<std::uint8_t>& buf, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::vector<std::uint8_t> idx_images(std::uint32_t magic, std::uint32_t n, std::uint32_t rows,
                                     std::uint32_t cols, std::vector<std::uint8_t> pixels) {
  std::vector<std::uint8_t> buf;
  put_be32(buf, magic);
  put_be32(buf, n);
  put_be32(buf, rows);
  put_be32(buf, cols);
  buf.insert(buf.end(), pixels.begin(), pixels.end());
  return buf;
}

std::vector<std::uint8_t> idx_labels(std::vector<std::uint8_t> labels) {
  std::vector<std::uint8_t> buf;
  put_be32(buf, 0x00000801);
  put_be32(buf, static_cast<std::uint32_t>(labels.size()));
  buf.insert(buf.end(), labels.begin(), labels.end());
  return buf;
}

TEST(Idx, HandBuiltBytes) {
  const auto images = idx_images(0x803, 2, 2, 2, {0, 255, 128, 64, 10, 20, 30, 40});
  const auto labels = idx_labels({3, 1});
  const ImageDataset ds = parse_idx(images, labels);
  EXPECT_EQ(ds.num_samples, 2u);
  EXPECT_EQ(ds.num_features(), 4u);
  EXPECT_EQ(ds.width, 2u);
  EXPECT_EQ(ds.num_classes, 4u);
  const auto img = ds.image(0);
  EXPECT_FLOAT_EQ(img[0], 0.0f);
  EXPECT_FLOAT_EQ(img[1], 1.0f);
  EXPECT_NEAR(img[2], 0.50196, 1e-5);
  EXPECT_NEAR(img[3], 0.25098, 1e-5);
  EXPECT_EQ(ds.labels[1], 1);
}

TEST(Idx, BadMagic) {
  const auto images = idx_images(0x0, 1, 2, 2, {0, 0, 0, 0});
  EXPECT_THROW(parse_idx(images, idx_labels({0})), FormatError);
}

TEST(Idx, CountMismatchAndTruncation) {
  const auto images = idx_images(0x803, 2, 2, 2, {0, 1, 2, 3, 4, 5, 6, 7});
  EXPECT_THROW(parse_idx(images, idx_labels({0})), ConsistencyError);
  const auto short_images = idx_images(0x803, 2, 2, 2, {0, 1, 2});
  EXPECT_THROW(parse_idx(short_images, idx_labels({0, 1})), IoError);
  const auto rect = idx_images(0x803, 1, 2, 3, {0, 1, 2, 3, 4, 5});
  EXPECT_THROW(parse_idx(rect, idx_labels({0})), ConsistencyError);
}

TEST(Idx, SaveLoadRoundTrip) {
  SynthSpec spec;
  spec.num_samples = 30;
  spec.width = 5;
  spec.num_classes = 3;
  spec.seed = 4;
  ImageDataset ds = synth(spec);
  // IDX stores bytes, so quantize first.
  for (auto& v : ds.features) v = static_cast<float>(std::lround(v * 255.0f)) / 255.0f;
  const auto dir = testing::scratch_dir("idx");
  save_idx(ds, dir / "img", dir / "lab");
  const ImageDataset back = load_idx(dir / "img", dir / "lab");
  EXPECT_EQ(back.labels, ds.labels);
  ASSERT_EQ(back.features.size(), ds.features.size());
  for (std::size_t i = 0; i < ds.features.size(); ++i)
    EXPECT_FLOAT_EQ(back.features[i], ds.features[i]);
}

TEST(Idx, MnistShape) {
  if (!testing::mnist_available()) GTEST_SKIP() << "MNIST IDX files not present";
  const std::filesystem::path dir = QFS_MNIST_DIR;
  const ImageDataset ds = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
  EXPECT_EQ(ds.width, 28u);
  EXPECT_EQ(ds.num_features(), 784u);
  EXPECT_EQ(ds.num_classes, 10u);
  EXPECT_NO_THROW(ds.validate());
}

TEST(Synth, Deterministic) {
  SynthSpec spec;
  spec.seed = 7;
  spec.informative_pixels = {3, 9};
  const ImageDataset a = synth(spec);
  const ImageDataset b = synth(spec);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(Synth, NoiselessPixelEqualsLabel) {
  SynthSpec spec;
  spec.noise_std = 0.0;
  spec.num_classes = 2;
  spec.informative_pixels = {5};
  const ImageDataset ds = synth(spec);
  for (std::size_t s = 0; s < ds.num_samples; ++s)
    EXPECT_EQ(ds.image(s)[5], static_cast<float>(ds.labels[s]));
}

TEST(Synth, InformativePixelHasLargestImportance) {
  SynthSpec spec;
  spec.num_samples = 2000;
  spec.num_classes = 4;
  spec.noise_std = 0.05;
  spec.informative_pixels = {27};
  spec.seed = 11;
  const ImportanceVector imp = importance(quantile_bins(synth(spec), 20));
  for (std::size_t f = 0; f < imp.size(); ++f)
    if (f != 27) EXPECT_GT(imp[27], imp[f]) << "pixel " << f;
}

TEST(Bins, ConstantFeature) {
  const std::vector<float> v(50, 0.3f);
  EXPECT_TRUE(quantile_edges(v, 20).empty());
  ImageDataset ds;
  ds.num_samples = 50;
  ds.width = 1;
  ds.num_classes = 1;
  ds.features = v;
  ds.labels.assign(50, 0);
  const DiscretizedDataset dd = quantile_bins(ds, 20);
  EXPECT_EQ(dd.effective_bins(0), 1u);
  for (auto b : dd.column(0)) EXPECT_EQ(b, 0);
}

// Edges from numpy.quantile(linear) on the same float32 inputs.
TEST(Bins, HundredValuesOracle) {
  std::vector<float> v;
  for (int i = 1; i <= 100; ++i) v.push_back(static_cast<float>(i) / 100.0f);
  const auto edges = quantile_edges(v, 20);
  ASSERT_EQ(edges.size(), 19u);
  for (std::size_t j = 0; j < edges.size(); ++j)
    EXPECT_NEAR(edges[j], 0.0595 + 0.0495 * static_cast<double>(j), 1e-6) << j;
  EXPECT_EQ(bin_of(edges, v[0]), 0u);
  EXPECT_EQ(bin_of(edges, v[4]), 0u);
  EXPECT_EQ(bin_of(edges, v[5]), 1u);
  EXPECT_EQ(bin_of(edges, v[49]), 9u);
  EXPECT_EQ(bin_of(edges, v[99]), 19u);
}

TEST(Bins, ValueOnEdgeFallsInLowerCell) {
  const std::vector<double> edges = {0.25, 0.5};
  EXPECT_EQ(bin_of(edges, 0.25), 0u);
  EXPECT_EQ(bin_of(edges, 0.2500001), 1u);
  EXPECT_EQ(bin_of(edges, 0.5), 1u);
  EXPECT_EQ(bin_of(edges, 0.75), 2u);
}

TEST(Bins, MonotoneAndCellsNonempty) {
  std::vector<float> v;
  for (int i = 0; i < 60; ++i) v.push_back(static_cast<float>(i) / 59.0f);
  const auto edges = quantile_edges(v, 20);
  std::vector<int> occupancy(20, 0);
  std::size_t prev = 0;
  for (float x : v) {
    const std::size_t b = bin_of(edges, x);
    EXPECT_GE(b, prev);
    prev = b;
    ++occupancy.at(b);
  }
  for (int c : occupancy) EXPECT_GT(c, 0);
}

TEST(Bins, EdgesStrictlyIncreasingWithTies) {
  std::vector<float> v(80, 0.0f);
  for (int i = 0; i < 20; ++i) v[static_cast<std::size_t>(i)] = static_cast<float>(i + 1) / 20.0f;
  const auto edges = quantile_edges(v, 20);
  EXPECT_LT(edges.size(), 19u);
  for (std::size_t j = 1; j < edges.size(); ++j) EXPECT_LT(edges[j - 1], edges[j]);
}

TEST(Bins, RejectsBadBinCount) {
  SynthSpec spec;
  const ImageDataset ds = synth(spec);
  EXPECT_THROW(quantile_bins(ds, 1), ConsistencyError);
  EXPECT_THROW(quantile_bins(ds, 257), ConsistencyError);
}

TEST(Bins, TestSplitUsesTrainEdges) {
  SynthSpec spec;
  spec.num_samples = 300;
  spec.seed = 2;
  const ImageDataset all = synth(spec);
  const ImageDataset train = all.slice(0, 200);
  const ImageDataset test = all.slice(200, 100);
  const DiscretizedDataset dtrain = quantile_bins(train, 8);
  const DiscretizedDataset dtest = apply_bins(test, dtrain.edges, 8);
  for (std::size_t f = 0; f < dtest.num_features; ++f)
    for (std::size_t s = 0; s < dtest.num_samples; ++s)
      EXPECT_EQ(dtest.column(f)[s], bin_of(dtrain.edges[f], test.image(s)[f]));
}

TEST(Bins, MnistMaxIndex) {
  if (!testing::mnist_available()) GTEST_SKIP() << "MNIST IDX files not present";
  const std::filesystem::path dir = QFS_MNIST_DIR;
  const ImageDataset ds =
      load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
  const DiscretizedDataset dd = quantile_bins(ds, 20);
  EXPECT_LE(*std::max_element(dd.bins.begin(), dd.bins.end()), 19);
  for (std::size_t f = 0; f < dd.num_features; ++f)
    for (auto b : dd.column(f)) ASSERT_LT(b, dd.effective_bins(f));
}

}  // namespace
}  // namespace qfs
