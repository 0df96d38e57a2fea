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

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace qfs {

/// dense(inputs -> base*base*c1) -> tconv(c1 -> c2, 4x4, s2, p1) -> ReLU
///   -> tconv(c2 -> 1, 4x4, s2, p1) -> sigmoid, giving a (4 base)^2 image.
struct DecoderShape {
  std::size_t inputs = 25;
  std::size_t c1 = 64;
  std::size_t c2 = 32;
  std::size_t base = 7;

  std::size_t side() const noexcept { return 4 * base; }
  std::size_t pixels() const noexcept { return side() * side(); }
  std::size_t dense_width() const noexcept { return base * base * c1; }

  bool operator==(const DecoderShape&) const = default;
};

template <class Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kDecoderTensors = 6;
inline constexpr std::array<std::string_view, kDecoderTensors> kDecoderTensorNames = {
    "dense_w", "dense_b", "tconv1_w", "tconv1_b", "tconv2_w", "tconv2_b"};

/// Activations are channel-last: a feature map of B images, H x W, C channels
/// is a (B*H*W) x C row-major matrix. Transposed-conv kernels are stored as
/// Cin x (16 * Cout) with column (ky * 4 + kx) * Cout + co.
template <class Scalar>
class Decoder {
 public:
  using Matrix = RowMatrix<Scalar>;
  using Gradients = std::array<Matrix, kDecoderTensors>;

  struct Activations {
    Matrix input;    // B x inputs
    Matrix dense;    // B x dense_width, read as (B*base*base) x c1
    Matrix pre1;     // (B*2base*2base) x c2
    Matrix act1;     // ReLU(pre1)
    Matrix output;   // B x pixels, after sigmoid
  };

  Decoder() = default;
  explicit Decoder(const DecoderShape& shape);

  /// Glorot-uniform weights, zero biases.
  static Decoder glorot(const DecoderShape& shape, std::uint64_t seed);

  const DecoderShape& shape() const noexcept { return shape_; }

  std::array<Matrix*, kDecoderTensors> tensors();
  std::array<const Matrix*, kDecoderTensors> tensors() const;

  Matrix forward(const Matrix& input) const;
  void forward(const Matrix& input, Activations& acts) const;

  /// Accumulates parameter gradients of a loss whose gradient w.r.t. the
  /// sigmoid outputs is d_output. grads are resized and overwritten.
  void backward(const Activations& acts, const Matrix& d_output, Gradients& grads) const;

  template <class To>
  Decoder<To> cast() const {
    Decoder<To> out(shape_);
    auto dst = out.tensors();
    auto src = tensors();
    for (std::size_t t = 0; t < kDecoderTensors; ++t) *dst[t] = src[t]->template cast<To>();
    return out;
  }

  Matrix dense_w;   // inputs x dense_width
  Matrix dense_b;   // 1 x dense_width
  Matrix tconv1_w;  // c1 x 16*c2
  Matrix tconv1_b;  // 1 x c2
  Matrix tconv2_w;  // c2 x 16
  Matrix tconv2_b;  // 1 x 1

 private:
  DecoderShape shape_;
};

using DecoderModel = Decoder<float>;

/// Mean squared error over every entry, and its gradient w.r.t. output.
template <class Scalar>
Scalar mse_loss(const RowMatrix<Scalar>& output, const RowMatrix<Scalar>& target,
                RowMatrix<Scalar>* d_output);

/// Stride-2, pad-1, 4x4 transposed convolution on channel-last maps.
template <class Scalar>
void tconv_forward(const RowMatrix<Scalar>& in, std::size_t batch, std::size_t height,
                   const RowMatrix<Scalar>& weight, const RowMatrix<Scalar>& bias,
                   RowMatrix<Scalar>& out);

template <class Scalar>
void tconv_backward(const RowMatrix<Scalar>& in, std::size_t batch, std::size_t height,
                    const RowMatrix<Scalar>& weight, const RowMatrix<Scalar>& d_out,
                    RowMatrix<Scalar>& d_weight, RowMatrix<Scalar>& d_bias,
                    RowMatrix<Scalar>* d_in);

extern template class Decoder<float>;
extern template class Decoder<double>;

}  // namespace qfs
