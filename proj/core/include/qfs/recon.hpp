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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qfs/decoder.hpp"
#include "qfs/ingest.hpp"
#include "qfs/mask.hpp"

namespace qfs {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  std::size_t c1 = 64;
  std::size_t c2 = 32;

  void validate() const;
};

struct TrainResult {
  DecoderModel model;
  std::vector<double> epoch_loss;  // mean training MSE seen during each epoch
};

/// Gathers the masked pixels of every sample into an N x k matrix.
RowMatrix<float> gather_inputs(const ImageDataset& ds, const SelectionMask& mask);

/// Adam on MSE with a seeded shuffle per epoch. Single-threaded and deterministic.
TrainResult train_decoder(const ImageDataset& train, const SelectionMask& mask,
                          const TrainConfig& cfg);

/// Mean over samples and pixels of the squared reconstruction error.
double eval_mse(const DecoderModel& model, const ImageDataset& test, const SelectionMask& mask);

/// Reconstructions for the first `count` samples, each a row of pixels.
RowMatrix<float> reconstruct(const DecoderModel& model, const ImageDataset& ds,
                             const SelectionMask& mask, std::size_t count);

/// Closed-form baseline: ridge regression from masked pixels to the full
/// image (intercept unpenalized). Returns test MSE. lambda must be > 0.
double ridge_decode(const ImageDataset& train, const ImageDataset& test,
                    const SelectionMask& mask, double lambda);

/// Max over all parameters of |g_a - g_n| / max(1e-12, |g_a| + |g_n|), with
/// g_n a central difference of the MSE loss. eps must lie in [1e-7, 1e-4].
double grad_check(const Decoder<double>& model, const RowMatrix<double>& input,
                  const RowMatrix<double>& target, double eps);

/// Same comparison reported per tensor, in kDecoderTensorNames order.
std::array<double, kDecoderTensors> grad_check_tensors(const Decoder<double>& model,
                                                       const RowMatrix<double>& input,
                                                       const RowMatrix<double>& target,
                                                       double eps);

/// Shifts each tconv1 bias so no pre-activation lies within `margin` of the
/// ReLU kink for this input. Returns true when every channel was cleared.
bool clear_relu_kinks(Decoder<double>& model, const RowMatrix<double>& input, double margin);

/// <prefix>.bin holds float32 little-endian tensors back to back;
/// <prefix>.manifest lists shape and (name rows cols offset bytes) per tensor.
void save_checkpoint(const DecoderModel& model, const std::filesystem::path& prefix);
DecoderModel load_checkpoint(const std::filesystem::path& prefix);

/// Binary PGM (P5), values in [0,1] scaled to 0..255.
void write_pgm(const std::filesystem::path& path, std::span<const float> pixels,
               std::size_t width);

}  // namespace qfs
