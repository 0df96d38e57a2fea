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
#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "qfs/errors.hpp"
#include "qfs/recon.hpp"

namespace qfs {

double ridge_decode(const ImageDataset& train, const ImageDataset& test,
                    const SelectionMask& mask, double lambda) {
  if (!(lambda > 0.0)) throw ConsistencyError("ridge decoding needs lambda > 0");
  if (train.num_features() != test.num_features())
    throw ConsistencyError("train and test images differ in size");
  using Mat = Eigen::MatrixXd;

  const Mat x = gather_inputs(train, mask).cast<double>();
  const Mat y = Eigen::Map<const RowMatrix<float>>(train.features.data(),
                                                   static_cast<Eigen::Index>(train.num_samples),
                                                   static_cast<Eigen::Index>(train.num_features()))
                    .cast<double>();
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const Eigen::RowVectorXd y_mean = y.colwise().mean();
  const Mat xc = x.rowwise() - x_mean;
  const Mat yc = y.rowwise() - y_mean;

  Mat gram = xc.transpose() * xc;
  gram.diagonal().array() += lambda;
  const Mat weights = gram.ldlt().solve(xc.transpose() * yc);

  const Mat xt = gather_inputs(test, mask).cast<double>();
  const Mat yt = Eigen::Map<const RowMatrix<float>>(test.features.data(),
                                                    static_cast<Eigen::Index>(test.num_samples),
                                                    static_cast<Eigen::Index>(test.num_features()))
                     .cast<double>();
  const Mat pred = ((xt.rowwise() - x_mean) * weights).rowwise() + y_mean;
  return (pred - yt).squaredNorm() / static_cast<double>(yt.size());
}

}  // namespace qfs
