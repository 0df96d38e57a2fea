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

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "qfs/errors.hpp"
#include "qfs/pipeline.hpp"
#include "qfs/recon.hpp"
#include "support/oracles.hpp"

namespace qfs {
namespace {

RowMatrix<double> uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                                 double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  RowMatrix<double> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Decoder<double> random_small_decoder(std::uint64_t seed) {
  Decoder<double> m = Decoder<double>::glorot(DecoderShape{3, 2, 2, 2}, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (auto* t : m.tensors())
    if (t->rows() == 1)
      for (Eigen::Index i = 0; i < t->size(); ++i) t->data()[i] = u(rng);
  return m;
}

ImageDataset planted(std::size_t samples, std::uint64_t seed) {
  SynthSpec spec;
  spec.num_samples = samples;
  spec.width = 16;
  spec.num_classes = 3;
  spec.informative_pixels = {37, 90, 155, 220};
  spec.noise_std = 0.1;
  spec.seed = seed;
  return synth(spec);
}

ImageDataset mnist_or_synth(std::size_t samples) {
  if (testing::mnist_available()) {
    const std::filesystem::path dir = QFS_MNIST_DIR;
    return load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte")
        .slice(0, samples);
  }
  SynthSpec spec;
  spec.num_samples = samples;
  spec.width = 28;
  spec.num_classes = 10;
  for (std::size_t p = 300; p < 500; p += 7) spec.informative_pixels.push_back(p);
  return synth(spec);
}

TEST(GradCheck, SmallRandomModel) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    Decoder<double> m = random_small_decoder(seed);
    const RowMatrix<double> input = uniform_matrix(4, 3, seed + 10, 0.0, 1.0);
    const RowMatrix<double> target = uniform_matrix(4, 64, seed + 20, 0.0, 1.0);
    ASSERT_TRUE(clear_relu_kinks(m, input, 1e-4));
    const auto per_tensor = grad_check_tensors(m, input, target, 1e-6);
    for (std::size_t t = 0; t < kDecoderTensors; ++t)
      EXPECT_LT(per_tensor[t], 1e-5) << kDecoderTensorNames[t] << " seed " << seed;
    EXPECT_LT(grad_check(m, input, target, 1e-6), 1e-5);
  }
}

TEST(GradCheck, ZeroModelFixedPoint) {
  const DecoderShape shape{3, 2, 2, 2};
  const Decoder<double> m(shape);
  const RowMatrix<double> input = RowMatrix<double>::Zero(2, 3);
  const RowMatrix<double> target = RowMatrix<double>::Zero(2, 64);
  Decoder<double>::Activations acts;
  Decoder<double>::Gradients grads;
  RowMatrix<double> d_out;
  m.forward(input, acts);
  EXPECT_EQ(mse_loss<double>(acts.output, target, &d_out), 0.25);
  m.backward(acts, d_out, grads);
  // dL/db = mean over outputs of 2 * 0.5 * sigmoid'(0) = 0.25
  EXPECT_EQ(grads[5](0, 0), 0.25);
  for (std::size_t t = 0; t + 1 < kDecoderTensors; ++t) EXPECT_EQ(grads[t].norm(), 0.0);
  const auto per_tensor = grad_check_tensors(m, input, target, 1e-6);
  EXPECT_LT(per_tensor[5], 1e-9);
}

TEST(GradCheck, RejectsEpsOutsideRange) {
  const Decoder<double> m(DecoderShape{3, 2, 2, 2});
  const RowMatrix<double> in = RowMatrix<double>::Zero(1, 3);
  const RowMatrix<double> target = RowMatrix<double>::Zero(1, 64);
  EXPECT_THROW(grad_check(m, in, target, 1e-2), ConsistencyError);
}

TEST(Decoder, OutputShapeAndRange) {
  const DecoderModel m = DecoderModel::glorot(DecoderShape{25, 64, 32, 7}, 5);
  const RowMatrix<float> out = m.forward(uniform_matrix(3, 25, 1, 0.0, 1.0).cast<float>());
  EXPECT_EQ(out.rows(), 3);
  EXPECT_EQ(out.cols(), 784);
  EXPECT_GT(out.minCoeff(), 0.0f);
  EXPECT_LT(out.maxCoeff(), 1.0f);
}

TEST(Train, MemorizesEightImages) {
  const ImageDataset train = mnist_or_synth(8);
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.batch_size = 8;
  cfg.seed = 3;
  const SelectionMask mask = grid_mask(28, 25);
  const TrainResult r = train_decoder(train, mask, cfg);
  const double mse = eval_mse(r.model, train, mask);
  EXPECT_LT(mse, 1e-3);
  const RowMatrix<float> out = reconstruct(r.model, train, mask, 8);
  EXPECT_GT(out.minCoeff(), 0.0f);
  EXPECT_LT(out.maxCoeff(), 1.0f);
}

TEST(Train, SeededRunsAreIdentical) {
  const ImageDataset train = mnist_or_synth(300);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 64;
  cfg.seed = 17;
  const SelectionMask mask = random_mask(784, 25, 1);
  const TrainResult a = train_decoder(train, mask, cfg);
  const TrainResult b = train_decoder(train, mask, cfg);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  const auto ta = a.model.tensors();
  const auto tb = b.model.tensors();
  for (std::size_t t = 0; t < kDecoderTensors; ++t) EXPECT_TRUE(*ta[t] == *tb[t]);
}

TEST(Train, LossFallsOverTwentyEpochs) {
  const ImageDataset train = mnist_or_synth(2000);
  TrainConfig cfg;
  cfg.seed = 2;
  const TrainResult r = train_decoder(train, random_mask(784, 25, 2), cfg);
  ASSERT_EQ(r.epoch_loss.size(), 20u);
  EXPECT_LT(r.epoch_loss.back(), r.epoch_loss.front());
}

TEST(Train, AllPixelsNoWorseThanTwentyFive) {
  const ImageDataset all = mnist_or_synth(3500);
  const ImageDataset train = all.slice(0, 3000);
  const ImageDataset test = all.slice(3000, 500);
  TrainConfig cfg;
  cfg.epochs = 8;
  cfg.seed = 4;
  const SelectionMask few = random_mask(784, 25, 4);
  const SelectionMask every = identity_mask(784);
  const double mse_few = eval_mse(train_decoder(train, few, cfg).model, test, few);
  const double mse_all = eval_mse(train_decoder(train, every, cfg).model, test, every);
  EXPECT_LE(mse_all, mse_few + 1e-4);
}

TEST(Eval, BiasOnlyModelIsExact) {
  ImageDataset ds;
  ds.num_samples = 6;
  ds.width = 8;
  ds.num_classes = 1;
  ds.features.assign(6 * 64, 0.25f);
  ds.labels.assign(6, 0);
  DecoderModel m(DecoderShape{2, 2, 2, 2});
  m.tconv2_b(0, 0) = static_cast<float>(std::log(0.25 / 0.75));
  const SelectionMask mask{64, {0, 1}, {}};
  EXPECT_NEAR(eval_mse(m, ds, mask), 0.0, 1e-10);
  EXPECT_THROW(eval_mse(m, ds, SelectionMask{64, {0, 1, 2}, {}}), ConsistencyError);
}

TEST(Ridge, IdentityReachable) {
  const ImageDataset all = planted(700, 1);
  const double mse = ridge_decode(all.slice(0, 500), all.slice(500, 200), identity_mask(256), 1e-6);
  EXPECT_LT(mse, 1e-8);
}

TEST(Ridge, LabelPixelDeterminesImage) {
  ImageDataset ds;
  ds.num_samples = 40;
  ds.width = 4;
  ds.num_classes = 2;
  ds.labels.resize(40);
  ds.features.resize(40 * 16);
  for (std::size_t s = 0; s < 40; ++s) {
    const int y = static_cast<int>((s * 7) % 2);
    ds.labels[s] = y;
    for (std::size_t f = 0; f < 16; ++f)
      ds.features[s * 16 + f] = y ? static_cast<float>(f) / 15.0f : 0.5f;
    ds.features[s * 16 + 6] = static_cast<float>(y);
  }
  const double mse = ridge_decode(ds.slice(0, 30), ds.slice(30, 10), SelectionMask{16, {6}, {}}, 1e-9);
  EXPECT_LT(mse, 1e-10);
  EXPECT_THROW(ridge_decode(ds, ds, SelectionMask{16, {6}, {}}, 0.0), ConsistencyError);
}

struct PlantedMasks {
  ImageDataset train, test;
  SelectionMask mi;
};

PlantedMasks planted_masks() {
  const ImageDataset all = planted(1300, 5);
  PlantedMasks p{all.slice(0, 1000), all.slice(1000, 300), {}};
  ExperimentConfig cfg;
  cfg.synth = true;
  cfg.k = 4;
  cfg.method = Method::FullQubo;
  p.mi = select_features(cfg, compute_mi(p.train, 20), 16, 0).mask;
  return p;
}

TEST(MaskQuality, PlantedRidge) {
  const PlantedMasks p = planted_masks();
  const double mi = ridge_decode(p.train, p.test, p.mi, 1.0);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed)
    if (mi < ridge_decode(p.train, p.test, random_mask(256, 4, seed), 1.0)) ++wins;
  EXPECT_GE(wins, 4);
}

TEST(MaskQuality, PlantedDecoder) {
  const PlantedMasks p = planted_masks();
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.batch_size = 32;
    cfg.seed = seed;
    cfg.c1 = 16;
    cfg.c2 = 8;
    const SelectionMask rnd = random_mask(256, 4, seed);
    const double mi = eval_mse(train_decoder(p.train, p.mi, cfg).model, p.test, p.mi);
    const double rn = eval_mse(train_decoder(p.train, rnd, cfg).model, p.test, rnd);
    if (mi < rn) ++wins;
  }
  EXPECT_GE(wins, 4);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const DecoderModel m = DecoderModel::glorot(DecoderShape{5, 4, 3, 2}, 12);
  const auto dir = testing::scratch_dir("ckpt");
  save_checkpoint(m, dir / "m");
  const DecoderModel back = load_checkpoint(dir / "m");
  EXPECT_EQ(back.shape(), m.shape());
  const auto a = m.tensors();
  const auto b = back.tensors();
  for (std::size_t t = 0; t < kDecoderTensors; ++t)
    EXPECT_EQ(std::memcmp(a[t]->data(), b[t]->data(), sizeof(float) * a[t]->size()), 0);
}

TEST(Checkpoint, DetectsDamage) {
  const DecoderModel m = DecoderModel::glorot(DecoderShape{5, 4, 3, 2}, 1);
  const auto dir = testing::scratch_dir("ckpt-bad");
  save_checkpoint(m, dir / "m");
  std::filesystem::resize_file(dir / "m.bin", 40);
  EXPECT_THROW(load_checkpoint(dir / "m"), IoError);
  std::ofstream(dir / "m.manifest") << "not-a-checkpoint 1\n";
  EXPECT_THROW(load_checkpoint(dir / "m"), FormatError);
  EXPECT_THROW(load_checkpoint(dir / "missing"), IoError);
}

TEST(Pgm, HeaderAndPixels) {
  const auto dir = testing::scratch_dir("pgm");
  const std::vector<float> px = {0.0f, 1.0f, 0.5f, 2.0f};
  write_pgm(dir / "a.pgm", px, 2);
  std::ifstream in(dir / "a.pgm", std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(bytes.substr(0, 11), "P5\n2 2\n255\n");
  ASSERT_EQ(bytes.size(), 15u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[11]), 0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 255);
  EXPECT_EQ(static_cast<unsigned char>(bytes[13]), 128);
  EXPECT_EQ(static_cast<unsigned char>(bytes[14]), 255);
  EXPECT_THROW(write_pgm(dir / "b.pgm", px, 3), ConsistencyError);
}

}  // namespace
}  // namespace qfs
