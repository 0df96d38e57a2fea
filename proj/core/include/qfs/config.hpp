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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfs/ingest.hpp"

namespace qfs {

enum class Method { Random, Grid, FullQubo, ReducedQubo };
enum class ConstraintChoice { Quadratic, Linear };
enum class SolverChoice { Auto, Partitioned, Anneal, Tabu, Exhaustive };
enum class DecoderChoice { Conv, Ridge };

std::string_view to_string(Method m);
std::string_view to_string(ConstraintChoice c);
std::string_view to_string(SolverChoice s);
std::string_view to_string(DecoderChoice d);

struct ExperimentConfig {
  // Data. data_dir holds the four MNIST-named IDX files unless synth is set.
  std::filesystem::path data_dir;
  bool synth = false;
  SynthSpec synth_spec;
  std::size_t synth_test_samples = 200;
  std::size_t train_limit = 0;  // 0: use every sample
  std::size_t test_limit = 0;

  // Selection.
  std::size_t bins = 20;
  std::size_t k = 25;
  Method method = Method::FullQubo;
  ConstraintChoice constraint = ConstraintChoice::Quadratic;  // full-qubo only; reduced is linear
  std::optional<double> alpha;  // quadratic weight; default derived from the MI terms
  double alpha_margin = 1.1;
  std::optional<double> alpha_max;  // bisection upper bound for the linear penalty
  std::size_t tune_steps = 30;
  std::size_t keep = 2000;
  unsigned mi_workers = 1;

  // Solver.
  SolverChoice solver = SolverChoice::Auto;
  std::size_t reads = 1000;
  std::size_t sweeps = 2000;
  std::size_t tabu_iters = 10000;
  std::size_t tabu_tenure = 20;
  std::size_t subproblem_size = 20;

  // Reconstruction.
  DecoderChoice decoder = DecoderChoice::Conv;
  double ridge_lambda = 1.0;
  double learning_rate = 1e-3;
  std::size_t epochs = 20;
  std::size_t batch_size = 128;
  std::size_t previews = 4;

  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "qfs-out";

  /// Assigns one key from its text form. Throws FormatError on unknown keys
  /// or unparsable values.
  void set(std::string_view key, std::string_view value);

  void validate() const;

  /// Every accepted key, in file order.
  static const std::vector<std::string>& keys();
};

/// Flat "key = value" lines; '#' starts a comment.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace qfs
