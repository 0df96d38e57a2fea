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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfs/config.hpp"
#include "qfs/ingest.hpp"
#include "qfs/mask.hpp"
#include "qfs/mi.hpp"
#include "qfs/qubo.hpp"
#include "qfs/report.hpp"
#include "qfs/solve.hpp"

namespace qfs {

struct Datasets {
  ImageDataset train;
  ImageDataset test;
};

/// Loads IDX files from cfg.data_dir or draws synthetic data, then applies
/// the train/test limits.
Datasets load_datasets(const ExperimentConfig& cfg);

struct MiTerms {
  ImportanceVector importance;
  RedundancyMatrix redundancy;
};

/// Text format: "mi <n>", then "i <f> <value>" per feature and
/// "r <i> <j> <value>" for every i <= j.
void write_mi_terms(std::ostream& out, const MiTerms& mi);
MiTerms read_mi_terms(std::istream& in);
void save_mi_terms(const MiTerms& mi, const std::filesystem::path& path);
MiTerms load_mi_terms(const std::filesystem::path& path);

MiTerms compute_mi(const ImageDataset& train, std::size_t bins, unsigned workers = 1);

/// Quadratic constraint weight that makes every weight-k state beat its
/// single-flip neighbours: margin * (max I + largest sum of k-1 redundancies in a row).
double auto_quadratic_alpha(const MiTerms& mi, std::size_t k, double margin);

struct Selection {
  SelectionMask mask;
  std::optional<QuboModel> qubo;  // the model handed to the solver, if any
  std::optional<double> alpha;
  std::size_t raw_weight = 0;      // Hamming weight before repair
  double solve_time_s = 0.0;
  double overhead_s = 0.0;         // QUBO construction and reduction
};

/// Method-specific selection for one repeat. Ends with exactly cfg.k indices.
Selection select_features(const ExperimentConfig& cfg, const MiTerms& mi, std::size_t width,
                          std::uint64_t seed);

struct StageTiming {
  std::string stage;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

struct PipelineResult {
  MetricsReport report;
  std::vector<StageTiming> timings;
  std::vector<SelectionMask> masks;  // repeat order
};

/// Runs every repeat and writes report.csv, summary.txt, timings.csv, masks,
/// QUBO dumps, checkpoints and PGM previews under cfg.out_dir. Errors are
/// rethrown as StageError.
PipelineResult run_pipeline(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace qfs
