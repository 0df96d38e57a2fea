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
#include "qfs/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "qfs/errors.hpp"
#include "qfs/recon.hpp"
#include "qfs/sparsify.hpp"
#include "qfs/text.hpp"

namespace qfs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

ImageDataset limit(ImageDataset ds, std::size_t n) {
  if (n == 0 || n >= ds.num_samples) return ds;
  return ds.slice(0, n);
}

Solver make_solver(const ExperimentConfig& cfg, std::uint64_t seed, SolverChoice fallback) {
  const SolverChoice choice = cfg.solver == SolverChoice::Auto ? fallback : cfg.solver;
  switch (choice) {
    case SolverChoice::Anneal: {
      AnnealParams p;
      p.reads = cfg.reads;
      p.sweeps = cfg.sweeps;
      p.seed = seed;
      return [p](const QuboModel& q) { return simulated_anneal(q, p); };
    }
    case SolverChoice::Tabu: {
      TabuParams p;
      p.iters = cfg.tabu_iters;
      p.tenure = cfg.tabu_tenure;
      p.seed = seed;
      return [p](const QuboModel& q) { return tabu(q, p); };
    }
    case SolverChoice::Exhaustive:
      return [](const QuboModel& q) { return exhaustive(q); };
    case SolverChoice::Auto:
    case SolverChoice::Partitioned:
      break;
  }
  PartitionParams p;
  p.subproblem_size = cfg.subproblem_size;
  p.seed = seed;
  return [p](const QuboModel& q) { return partitioned_solve(q, p); };
}

std::string run_tag(const ExperimentConfig& cfg, std::uint64_t seed) {
  return std::string(to_string(cfg.method)) + "_seed" + std::to_string(seed);
}

Selection select_qubo(const ExperimentConfig& cfg, const MiTerms& mi, const SelectionMask& domain,
                      const ImportanceVector& imp, const RedundancyMatrix& red,
                      std::uint64_t seed, SolverChoice fallback, const std::string& step,
                      ConstraintChoice constraint, bool threshold) {
  Selection sel;
  auto t0 = Clock::now();
  QuboModel base = assemble(imp, red, NoConstraint{});
  if (threshold) base = threshold_couplings(base, cfg.keep);
  const Solver solver = make_solver(cfg, seed, fallback);

  BitVector x;
  if (constraint == ConstraintChoice::Quadratic) {
    const double alpha = cfg.alpha ? *cfg.alpha : auto_quadratic_alpha(mi, cfg.k, cfg.alpha_margin);
    QuboModel q = base;
    apply_constraint(q, QuadraticConstraint{alpha, cfg.k});
    sel.overhead_s = seconds_since(t0);
    t0 = Clock::now();
    x = best(solver(q)).x;
    sel.qubo = std::move(q);
    sel.alpha = alpha;
  } else {
    sel.overhead_s = seconds_since(t0);
    t0 = Clock::now();
    TuneOptions opts;
    opts.max_steps = cfg.tune_steps;
    opts.alpha_max = cfg.alpha_max;
    TuneResult tuned = tune_alpha(base, cfg.k, solver, opts);
    x = best(tuned.samples).x;
    QuboModel q = base;
    apply_constraint(q, LinearPenalty{tuned.alpha, cfg.k});
    sel.qubo = std::move(q);
    sel.alpha = tuned.alpha;
  }
  sel.raw_weight = hamming_weight(x);
  x = repair_weight(base, std::move(x), cfg.k);
  sel.solve_time_s = seconds_since(t0);
  sel.mask = mask_from_bits(domain, x, step);
  return sel;
}

}  // namespace

Datasets load_datasets(const ExperimentConfig& cfg) {
  Datasets d;
  if (cfg.synth) {
    SynthSpec spec = cfg.synth_spec;
    spec.num_samples += cfg.synth_test_samples;
    const ImageDataset all = synth(spec);
    d.train = all.slice(0, cfg.synth_spec.num_samples);
    d.test = all.slice(cfg.synth_spec.num_samples, cfg.synth_test_samples);
  } else {
    const auto& dir = cfg.data_dir;
    d.train = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
    d.test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
  }
  d.train = limit(std::move(d.train), cfg.train_limit);
  d.test = limit(std::move(d.test), cfg.test_limit);
  if (d.train.width != d.test.width) throw ConsistencyError("train and test image sizes differ");
  return d;
}

void write_mi_terms(std::ostream& out, const MiTerms& mi) {
  const std::size_t n = mi.importance.values.size();
  if (mi.redundancy.size() != n) throw ConsistencyError("importance and redundancy sizes differ");
  out << "mi " << n << '\n';
  for (std::size_t i = 0; i < n; ++i)
    out << "i " << i << ' ' << format_double(mi.importance.values[i]) << '\n';
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      out << "r " << i << ' ' << j << ' ' << format_double(mi.redundancy(i, j)) << '\n';
}

MiTerms read_mi_terms(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty MI file");
  auto head = split_fields(line);
  if (head.size() != 2 || head[0] != "mi") throw FormatError("bad MI header");
  const std::size_t n = parse_size(head[1]);
  MiTerms mi{ImportanceVector{std::vector<double>(n, 0.0)}, RedundancyMatrix(n)};
  std::size_t seen_i = 0;
  std::size_t seen_r = 0;
  while (std::getline(in, line)) {
    const auto f = split_fields(line);
    if (f.empty()) continue;
    if (f[0] == "i" && f.size() == 3) {
      const std::size_t i = parse_size(f[1]);
      if (i >= n) throw IndexError("MI feature index out of range");
      mi.importance.values[i] = parse_double(f[2]);
      ++seen_i;
    } else if (f[0] == "r" && f.size() == 4) {
      const std::size_t i = parse_size(f[1]);
      const std::size_t j = parse_size(f[2]);
      if (i > j || j >= n) throw IndexError("MI pair index out of range");
      mi.redundancy.set(i, j, parse_double(f[3]));
      ++seen_r;
    } else {
      throw FormatError("bad MI line: " + line);
    }
  }
  if (seen_i != n || seen_r != n * (n + 1) / 2) throw FormatError("MI file is incomplete");
  return mi;
}

void save_mi_terms(const MiTerms& mi, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_mi_terms(out, mi);
  if (!out) throw IoError("short write on " + path.string());
}

MiTerms load_mi_terms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mi_terms(in);
}

MiTerms compute_mi(const ImageDataset& train, std::size_t bins, unsigned workers) {
  const DiscretizedDataset dd = quantile_bins(train, bins);
  return {importance(dd), redundancy(dd, workers)};
}

double auto_quadratic_alpha(const MiTerms& mi, std::size_t k, double margin) {
  const std::size_t n = mi.importance.values.size();
  if (n == 0) throw EmptyError("no features");
  double max_importance = 0.0;
  double max_row = 0.0;
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    max_importance = std::max(max_importance, mi.importance.values[i]);
    row.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back(mi.redundancy(i, j));
    const std::size_t take = std::min(row.size(), k > 0 ? k - 1 : 0);
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(take), row.end(),
                      std::greater<>());
    double sum = 0.0;
    for (std::size_t t = 0; t < take; ++t) sum += row[t];
    max_row = std::max(max_row, sum);
  }
  return margin * (max_importance + max_row);
}

Selection select_features(const ExperimentConfig& cfg, const MiTerms& mi, std::size_t width,
                          std::uint64_t seed) {
  const std::size_t n = width * width;
  switch (cfg.method) {
    case Method::Random: {
      Selection sel;
      sel.mask = random_mask(n, cfg.k, seed);
      sel.raw_weight = cfg.k;
      return sel;
    }
    case Method::Grid: {
      Selection sel;
      sel.mask = grid_mask(width, cfg.k);
      sel.raw_weight = cfg.k;
      return sel;
    }
    case Method::FullQubo:
      if (mi.importance.values.size() != n) throw ConsistencyError("MI terms do not match image");
      return select_qubo(cfg, mi, identity_mask(n), mi.importance, mi.redundancy, seed,
                         SolverChoice::Partitioned, "full-qubo", cfg.constraint, false);
    case Method::ReducedQubo: {
      if (mi.importance.values.size() != n) throw ConsistencyError("MI terms do not match image");
      const auto t0 = Clock::now();
      const SelectionMask sub = subsample_2x2(mi.importance, width);
      auto [imp, red] = restrict_terms(mi.importance, mi.redundancy, sub);
      const double reduce_s = seconds_since(t0);
      Selection sel = select_qubo(cfg, MiTerms{imp, red}, sub, imp, red, seed,
                                  SolverChoice::Anneal, "reduced-qubo", ConstraintChoice::Linear,
                                  true);
      sel.overhead_s += reduce_s;
      return sel;
    }
  }
  throw ConsistencyError("unknown method");
}

PipelineResult run_pipeline(const ExperimentConfig& cfg, std::ostream* log) {
  staged("config", [&] { cfg.validate(); });
  namespace fs = std::filesystem;
  const fs::path out = cfg.out_dir;
  staged("output", [&] {
    for (const char* sub : {"masks", "qubo", "checkpoints", "previews"})
      fs::create_directories(out / sub);
    std::ofstream resolved(out / "config.txt");
    write_config(resolved, cfg);
  });

  PipelineResult result;
  const Datasets data = staged("ingest", [&] { return load_datasets(cfg); });
  if (log)
    *log << "ingest: " << data.train.num_samples << " train / " << data.test.num_samples
         << " test images, width " << data.train.width << '\n';

  const bool needs_mi = cfg.method == Method::FullQubo || cfg.method == Method::ReducedQubo;
  MiTerms mi;
  if (needs_mi) {
    const auto t0 = Clock::now();
    mi = staged("mi", [&] { return compute_mi(data.train, cfg.bins, cfg.mi_workers); });
    result.timings.push_back({"mi", cfg.seed, seconds_since(t0)});
    if (log) *log << "mi: " << result.timings.back().seconds << " s\n";
  }

  std::vector<RunResult> runs;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t seed = cfg.seed + r;
    const std::string tag = run_tag(cfg, seed);
    const auto t0 = Clock::now();

    Selection sel = staged("select", [&] {
      return select_features(cfg, mi, data.train.width, seed);
    });
    staged("output", [&] {
      save_mask(sel.mask, out / "masks" / (tag + ".mask"));
      if (sel.qubo) {
        save_qubo(*sel.qubo, out / "qubo" / (tag + ".qubo"));
        if (log) {
          *log << tag << ": alpha " << *sel.alpha << ", solver weight " << sel.raw_weight << '\n';
          print_degree_report(*log, degree_report(*sel.qubo));
        }
      }
    });
    result.timings.push_back({"qubo_build", seed, sel.overhead_s});
    result.timings.push_back({"solve", seed, sel.solve_time_s});

    const auto t1 = Clock::now();
    const double mse = staged("train", [&] {
      if (cfg.decoder == DecoderChoice::Ridge)
        return ridge_decode(data.train, data.test, sel.mask, cfg.ridge_lambda);
      TrainConfig tc;
      tc.learning_rate = cfg.learning_rate;
      tc.epochs = cfg.epochs;
      tc.batch_size = cfg.batch_size;
      tc.seed = seed;
      const TrainResult trained = train_decoder(data.train, sel.mask, tc);
      const double test_mse = eval_mse(trained.model, data.test, sel.mask);
      save_checkpoint(trained.model, out / "checkpoints" / tag);
      const RowMatrix<float> recon =
          reconstruct(trained.model, data.test, sel.mask, cfg.previews);
      const std::size_t pixels = data.test.num_features();
      for (Eigen::Index i = 0; i < recon.rows(); ++i) {
        const std::string stem = tag + "_" + std::to_string(i);
        write_pgm(out / "previews" / (stem + "_recon.pgm"),
                  {recon.data() + i * recon.cols(), pixels}, data.test.width);
        write_pgm(out / "previews" / (stem + "_target.pgm"),
                  data.test.image(static_cast<std::size_t>(i)), data.test.width);
      }
      return test_mse;
    });
    result.timings.push_back({"train_eval", seed, seconds_since(t1)});

    runs.push_back({std::string(to_string(cfg.method)), seed, mse, seconds_since(t0)});
    result.masks.push_back(std::move(sel.mask));
    if (log) *log << tag << ": test_mse " << mse << '\n';
  }

  result.report = summarize(std::move(runs));
  staged("report", [&] {
    std::ofstream csv(out / "report.csv");
    write_report_csv(csv, result.report.runs);
    std::ofstream summary(out / "summary.txt");
    summary << summary_line(result.report) << '\n';
    std::ofstream timings(out / "timings.csv");
    timings << "stage,seed,seconds\n";
    for (const auto& t : result.timings)
      timings << t.stage << ',' << t.seed << ',' << t.seconds << '\n';
    if (!csv || !summary || !timings) throw IoError("cannot write report files");
  });
  if (log) *log << summary_line(result.report) << '\n';
  return result;
}

}  // namespace qfs
