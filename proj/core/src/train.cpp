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
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qfs/errors.hpp"
#include "qfs/random.hpp"
#include "qfs/recon.hpp"

namespace qfs {
namespace {

void check_mask(const ImageDataset& ds, const SelectionMask& mask) {
  mask.validate();
  if (mask.original_n != ds.num_features())
    throw ConsistencyError("mask was built for a different image size");
  if (mask.size() < 1) throw ConsistencyError("mask selects no pixels");
}

RowMatrix<float> gather_rows(const RowMatrix<float>& src, std::span<const std::size_t> rows) {
  RowMatrix<float> out(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = src.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

Eigen::Map<const RowMatrix<float>> image_matrix(const ImageDataset& ds) {
  return {ds.features.data(), static_cast<Eigen::Index>(ds.num_samples),
          static_cast<Eigen::Index>(ds.num_features())};
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || epochs < 1 || batch_size < 1 || !(epsilon > 0.0) || c1 < 1 ||
      c2 < 1)
    throw ConsistencyError("training hyperparameters must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
    throw ConsistencyError("Adam betas must lie in [0,1)");
}

RowMatrix<float> gather_inputs(const ImageDataset& ds, const SelectionMask& mask) {
  check_mask(ds, mask);
  RowMatrix<float> out(static_cast<Eigen::Index>(ds.num_samples),
                       static_cast<Eigen::Index>(mask.size()));
  const std::size_t n = ds.num_features();
  for (std::size_t s = 0; s < ds.num_samples; ++s)
    for (std::size_t c = 0; c < mask.size(); ++c)
      out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) =
          ds.features[s * n + mask.indices[c]];
  return out;
}

TrainResult train_decoder(const ImageDataset& train, const SelectionMask& mask,
                          const TrainConfig& cfg) {
  cfg.validate();
  check_mask(train, mask);
  if (train.width % 4 != 0) throw ConsistencyError("decoder needs an image width divisible by 4");

  const DecoderShape shape{mask.size(), cfg.c1, cfg.c2, train.width / 4};
  TrainResult result{DecoderModel::glorot(shape, derive_seed(cfg.seed, 1)), {}};
  DecoderModel& model = result.model;

  const RowMatrix<float> inputs = gather_inputs(train, mask);
  const RowMatrix<float> targets = image_matrix(train);

  auto params = model.tensors();
  std::array<RowMatrix<float>, kDecoderTensors> m1, m2;
  for (std::size_t t = 0; t < kDecoderTensors; ++t) {
    m1[t] = RowMatrix<float>::Zero(params[t]->rows(), params[t]->cols());
    m2[t] = RowMatrix<float>::Zero(params[t]->rows(), params[t]->cols());
  }

  std::vector<std::size_t> order(train.num_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(cfg.seed, 2));

  DecoderModel::Activations acts;
  DecoderModel::Gradients grads;
  RowMatrix<float> d_out;
  const auto lr = static_cast<float>(cfg.learning_rate);
  const auto b1 = static_cast<float>(cfg.beta1);
  const auto b2 = static_cast<float>(cfg.beta2);
  const auto eps = static_cast<float>(cfg.epsilon);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const std::span<const std::size_t> rows(order.data() + begin, end - begin);
      const RowMatrix<float> x = gather_rows(inputs, rows);
      const RowMatrix<float> y = gather_rows(targets, rows);

      model.forward(x, acts);
      const float loss = mse_loss<float>(acts.output, y, &d_out);
      model.backward(acts, d_out, grads);
      loss_sum += static_cast<double>(loss) * static_cast<double>(rows.size());

      ++step;
      const auto c1 = static_cast<float>(1.0 - std::pow(cfg.beta1, static_cast<double>(step)));
      const auto c2 = static_cast<float>(1.0 - std::pow(cfg.beta2, static_cast<double>(step)));
      for (std::size_t t = 0; t < kDecoderTensors; ++t) {
        auto g = grads[t].array();
        m1[t].array() = b1 * m1[t].array() + (1.0f - b1) * g;
        m2[t].array() = b2 * m2[t].array() + (1.0f - b2) * g.square();
        params[t]->array() -=
            lr * (m1[t].array() / c1) / ((m2[t].array() / c2).sqrt() + eps);
      }
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(order.size()));
  }
  return result;
}

RowMatrix<float> reconstruct(const DecoderModel& model, const ImageDataset& ds,
                             const SelectionMask& mask, std::size_t count) {
  const RowMatrix<float> inputs = gather_inputs(ds, mask);
  const auto rows = static_cast<Eigen::Index>(std::min(count, ds.num_samples));
  return model.forward(inputs.topRows(rows));
}

double eval_mse(const DecoderModel& model, const ImageDataset& test, const SelectionMask& mask) {
  check_mask(test, mask);
  if (model.shape().inputs != mask.size() || model.shape().pixels() != test.num_features())
    throw ConsistencyError("model shape does not match mask or images");
  const RowMatrix<float> inputs = gather_inputs(test, mask);
  const auto images = image_matrix(test);
  constexpr Eigen::Index kChunk = 256;
  double total = 0.0;
  for (Eigen::Index begin = 0; begin < inputs.rows(); begin += kChunk) {
    const Eigen::Index rows = std::min(kChunk, inputs.rows() - begin);
    const RowMatrix<float> out = model.forward(inputs.middleRows(begin, rows));
    total += (out - images.middleRows(begin, rows)).cast<double>().squaredNorm();
  }
  return total / (static_cast<double>(test.num_samples) * static_cast<double>(test.num_features()));
}

std::array<double, kDecoderTensors> grad_check_tensors(const Decoder<double>& model,
                                                       const RowMatrix<double>& input,
                                                       const RowMatrix<double>& target,
                                                       double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-4)) throw ConsistencyError("eps must lie in [1e-7, 1e-4]");
  Decoder<double>::Activations acts;
  Decoder<double>::Gradients grads;
  RowMatrix<double> d_out;
  model.forward(input, acts);
  mse_loss<double>(acts.output, target, &d_out);
  model.backward(acts, d_out, grads);

  Decoder<double> probe = model;
  auto params = probe.tensors();
  std::array<double, kDecoderTensors> worst{};
  for (std::size_t t = 0; t < kDecoderTensors; ++t) {
    double* data = params[t]->data();
    for (Eigen::Index e = 0; e < params[t]->size(); ++e) {
      const double saved = data[e];
      data[e] = saved + eps;
      const double plus = mse_loss<double>(probe.forward(input), target, nullptr);
      data[e] = saved - eps;
      const double minus = mse_loss<double>(probe.forward(input), target, nullptr);
      data[e] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double analytic = grads[t].data()[e];
      const double rel =
          std::abs(analytic - numeric) / std::max(1e-12, std::abs(analytic) + std::abs(numeric));
      worst[t] = std::max(worst[t], rel);
    }
  }
  return worst;
}

double grad_check(const Decoder<double>& model, const RowMatrix<double>& input,
                  const RowMatrix<double>& target, double eps) {
  const auto per_tensor = grad_check_tensors(model, input, target, eps);
  return *std::max_element(per_tensor.begin(), per_tensor.end());
}

bool clear_relu_kinks(Decoder<double>& model, const RowMatrix<double>& input, double margin) {
  Decoder<double>::Activations acts;
  model.forward(input, acts);
  bool all_clear = true;
  for (Eigen::Index c = 0; c < acts.pre1.cols(); ++c) {
    const auto column = acts.pre1.col(c);
    auto clear_at = [&](double shift) {
      return ((column.array() + shift).abs() >= margin).all();
    };
    double shift = 0.0;
    bool found = clear_at(0.0);
    for (int step = 1; !found && step <= 1000; ++step) {
      for (double candidate : {step * margin, -step * margin})
        if (clear_at(candidate)) {
          shift = candidate;
          found = true;
          break;
        }
    }
    if (found) {
      model.tconv1_b(0, c) += shift;
    } else {
      all_clear = false;
    }
  }
  return all_clear;
}

}  // namespace qfs
