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
#include "qfs/decoder.hpp"

#include <cmath>
#include <random>

#include "qfs/errors.hpp"

namespace qfs {

template <class Scalar>
void tconv_forward(const RowMatrix<Scalar>& in, std::size_t batch, std::size_t height,
                   const RowMatrix<Scalar>& weight, const RowMatrix<Scalar>& bias,
                   RowMatrix<Scalar>& out) {
  const auto co = static_cast<std::size_t>(weight.cols()) / 16;
  const std::size_t h = height;
  const std::size_t h2 = 2 * height;
  const RowMatrix<Scalar> cols = in * weight;
  out.resize(static_cast<Eigen::Index>(batch * h2 * h2), static_cast<Eigen::Index>(co));
  out.rowwise() = bias.row(0);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t iy = 0; iy < h; ++iy)
      for (std::size_t ix = 0; ix < h; ++ix) {
        const Scalar* src = cols.data() + ((b * h + iy) * h + ix) * 16 * co;
        for (std::size_t ky = 0; ky < 4; ++ky) {
          const std::ptrdiff_t oy = 2 * static_cast<std::ptrdiff_t>(iy) - 1 + static_cast<std::ptrdiff_t>(ky);
          if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(h2)) continue;
          for (std::size_t kx = 0; kx < 4; ++kx) {
            const std::ptrdiff_t ox = 2 * static_cast<std::ptrdiff_t>(ix) - 1 + static_cast<std::ptrdiff_t>(kx);
            if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(h2)) continue;
            Scalar* dst = out.data() + ((b * h2 + oy) * h2 + ox) * co;
            const Scalar* tap = src + (ky * 4 + kx) * co;
            for (std::size_t c = 0; c < co; ++c) dst[c] += tap[c];
          }
        }
      }
}

template <class Scalar>
void tconv_backward(const RowMatrix<Scalar>& in, std::size_t batch, std::size_t height,
                    const RowMatrix<Scalar>& weight, const RowMatrix<Scalar>& d_out,
                    RowMatrix<Scalar>& d_weight, RowMatrix<Scalar>& d_bias,
                    RowMatrix<Scalar>* d_in) {
  const auto co = static_cast<std::size_t>(weight.cols()) / 16;
  const std::size_t h = height;
  const std::size_t h2 = 2 * height;
  RowMatrix<Scalar> d_cols = RowMatrix<Scalar>::Zero(in.rows(), weight.cols());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t iy = 0; iy < h; ++iy)
      for (std::size_t ix = 0; ix < h; ++ix) {
        Scalar* dst = d_cols.data() + ((b * h + iy) * h + ix) * 16 * co;
        for (std::size_t ky = 0; ky < 4; ++ky) {
          const std::ptrdiff_t oy = 2 * static_cast<std::ptrdiff_t>(iy) - 1 + static_cast<std::ptrdiff_t>(ky);
          if (oy < 0 || oy >= static_cast<std::ptrdiff_t>(h2)) continue;
          for (std::size_t kx = 0; kx < 4; ++kx) {
            const std::ptrdiff_t ox = 2 * static_cast<std::ptrdiff_t>(ix) - 1 + static_cast<std::ptrdiff_t>(kx);
            if (ox < 0 || ox >= static_cast<std::ptrdiff_t>(h2)) continue;
            const Scalar* src = d_out.data() + ((b * h2 + oy) * h2 + ox) * co;
            Scalar* tap = dst + (ky * 4 + kx) * co;
            for (std::size_t c = 0; c < co; ++c) tap[c] = src[c];
          }
        }
      }
  d_weight.noalias() = in.transpose() * d_cols;
  d_bias = d_out.colwise().sum();
  if (d_in) d_in->noalias() = d_cols * weight.transpose();
}

template <class Scalar>
Scalar mse_loss(const RowMatrix<Scalar>& output, const RowMatrix<Scalar>& target,
                RowMatrix<Scalar>* d_output) {
  if (output.rows() != target.rows() || output.cols() != target.cols())
    throw ConsistencyError("output and target shapes differ");
  const auto count = static_cast<Scalar>(output.size());
  const RowMatrix<Scalar> diff = output - target;
  if (d_output) *d_output = diff * (Scalar(2) / count);
  return diff.squaredNorm() / count;
}

template <class Scalar>
Decoder<Scalar>::Decoder(const DecoderShape& shape) : shape_(shape) {
  const auto in = static_cast<Eigen::Index>(shape.inputs);
  const auto dw = static_cast<Eigen::Index>(shape.dense_width());
  const auto c1 = static_cast<Eigen::Index>(shape.c1);
  const auto c2 = static_cast<Eigen::Index>(shape.c2);
  dense_w = Matrix::Zero(in, dw);
  dense_b = Matrix::Zero(1, dw);
  tconv1_w = Matrix::Zero(c1, 16 * c2);
  tconv1_b = Matrix::Zero(1, c2);
  tconv2_w = Matrix::Zero(c2, 16);
  tconv2_b = Matrix::Zero(1, 1);
}

template <class Scalar>
Decoder<Scalar> Decoder<Scalar>::glorot(const DecoderShape& shape, std::uint64_t seed) {
  Decoder d(shape);
  std::mt19937_64 rng(seed);
  auto fill = [&](Matrix& m, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Scalar>(dist(rng));
  };
  fill(d.dense_w, static_cast<double>(shape.inputs), static_cast<double>(shape.dense_width()));
  fill(d.tconv1_w, 16.0 * shape.c2, 16.0 * shape.c1);
  fill(d.tconv2_w, 16.0, 16.0 * shape.c2);
  return d;
}

template <class Scalar>
auto Decoder<Scalar>::tensors() -> std::array<Matrix*, kDecoderTensors> {
  return {&dense_w, &dense_b, &tconv1_w, &tconv1_b, &tconv2_w, &tconv2_b};
}

template <class Scalar>
auto Decoder<Scalar>::tensors() const -> std::array<const Matrix*, kDecoderTensors> {
  return {&dense_w, &dense_b, &tconv1_w, &tconv1_b, &tconv2_w, &tconv2_b};
}

template <class Scalar>
void Decoder<Scalar>::forward(const Matrix& input, Activations& acts) const {
  if (static_cast<std::size_t>(input.cols()) != shape_.inputs)
    throw ConsistencyError("decoder input width does not match the model");
  const auto batch = static_cast<std::size_t>(input.rows());
  const std::size_t base = shape_.base;
  acts.input = input;
  acts.dense.noalias() = input * dense_w;
  acts.dense.rowwise() += dense_b.row(0);
  const Matrix maps = Eigen::Map<const Matrix>(
      acts.dense.data(), static_cast<Eigen::Index>(batch * base * base),
      static_cast<Eigen::Index>(shape_.c1));
  tconv_forward<Scalar>(maps, batch, base, tconv1_w, tconv1_b, acts.pre1);
  acts.act1 = acts.pre1.cwiseMax(Scalar(0));
  Matrix pre2;
  tconv_forward<Scalar>(acts.act1, batch, 2 * base, tconv2_w, tconv2_b, pre2);
  const auto logits = Eigen::Map<const Matrix>(pre2.data(), static_cast<Eigen::Index>(batch),
                                               static_cast<Eigen::Index>(shape_.pixels()));
  acts.output = (Scalar(1) + (-logits.array()).exp()).inverse().matrix();
}

template <class Scalar>
auto Decoder<Scalar>::forward(const Matrix& input) const -> Matrix {
  Activations acts;
  forward(input, acts);
  return std::move(acts.output);
}

template <class Scalar>
void Decoder<Scalar>::backward(const Activations& acts, const Matrix& d_output,
                               Gradients& grads) const {
  const auto batch = static_cast<std::size_t>(acts.input.rows());
  const std::size_t base = shape_.base;
  const Matrix d_logits =
      (d_output.array() * acts.output.array() * (Scalar(1) - acts.output.array())).matrix();
  const Matrix d_pre2 = Eigen::Map<const Matrix>(
      d_logits.data(), static_cast<Eigen::Index>(batch * shape_.pixels()), 1);

  Matrix d_act1;
  tconv_backward<Scalar>(acts.act1, batch, 2 * base, tconv2_w, d_pre2, grads[4], grads[5],
                         &d_act1);
  const Matrix d_pre1 =
      (d_act1.array() * (acts.pre1.array() > Scalar(0)).template cast<Scalar>()).matrix();

  const Matrix maps = Eigen::Map<const Matrix>(
      acts.dense.data(), static_cast<Eigen::Index>(batch * base * base),
      static_cast<Eigen::Index>(shape_.c1));
  Matrix d_maps;
  tconv_backward<Scalar>(maps, batch, base, tconv1_w, d_pre1, grads[2], grads[3], &d_maps);
  const auto d_dense = Eigen::Map<const Matrix>(d_maps.data(), static_cast<Eigen::Index>(batch),
                                                static_cast<Eigen::Index>(shape_.dense_width()));
  grads[0].noalias() = acts.input.transpose() * d_dense;
  grads[1] = d_dense.colwise().sum();
}

template class Decoder<float>;
template class Decoder<double>;

template float mse_loss<float>(const RowMatrix<float>&, const RowMatrix<float>&, RowMatrix<float>*);
template double mse_loss<double>(const RowMatrix<double>&, const RowMatrix<double>&,
                                 RowMatrix<double>*);
template void tconv_forward<float>(const RowMatrix<float>&, std::size_t, std::size_t,
                                   const RowMatrix<float>&, const RowMatrix<float>&,
                                   RowMatrix<float>&);
template void tconv_forward<double>(const RowMatrix<double>&, std::size_t, std::size_t,
                                    const RowMatrix<double>&, const RowMatrix<double>&,
                                    RowMatrix<double>&);
template void tconv_backward<float>(const RowMatrix<float>&, std::size_t, std::size_t,
                                    const RowMatrix<float>&, const RowMatrix<float>&,
                                    RowMatrix<float>&, RowMatrix<float>&, RowMatrix<float>*);
template void tconv_backward<double>(const RowMatrix<double>&, std::size_t, std::size_t,
                                     const RowMatrix<double>&, const RowMatrix<double>&,
                                     RowMatrix<double>&, RowMatrix<double>&, RowMatrix<double>*);

}  // namespace qfs
