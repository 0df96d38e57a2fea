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
// qfs: command line front end for the feature selection pipeline.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "qfs/config.hpp"
#include "qfs/errors.hpp"
#include "qfs/pipeline.hpp"
#include "qfs/recon.hpp"
#include "qfs/sparsify.hpp"
#include "qfs/text.hpp"

namespace {

using namespace qfs;

// Exposes every ExperimentConfig key as a flag, layered over --config.
class ConfigFlags {
 public:
  void attach(CLI::App* app) {
    app->add_option("--config", file_, "key = value configuration file");
    for (const auto& key : ExperimentConfig::keys()) {
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      std::string names = "--" + dashed;
      if (dashed != key) names += ",--" + key;
      options_[key] = app->add_option(names, values_[key], "config key " + key);
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = file_.empty() ? ExperimentConfig{} : load_config(file_);
    for (const auto& [key, opt] : options_)
      if (opt->count() > 0) cfg.set(key, values_.at(key));
    return cfg;
  }

 private:
  std::string file_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void print_dataset(const char* name, const ImageDataset& ds) {
  const auto [lo, hi] = std::minmax_element(ds.features.begin(), ds.features.end());
  std::cout << name << ": " << ds.num_samples << " images, " << ds.width << "x" << ds.width
            << ", " << ds.num_classes << " classes, pixels in [" << *lo << ", " << *hi << "]\n";
}

MiTerms mi_for(const ExperimentConfig& cfg, const std::string& mi_path, std::size_t& width) {
  if (!mi_path.empty()) {
    MiTerms mi = load_mi_terms(mi_path);
    width = static_cast<std::size_t>(std::lround(std::sqrt(mi.importance.values.size())));
    return mi;
  }
  const Datasets data = load_datasets(cfg);
  width = data.train.width;
  return compute_mi(data.train, cfg.bins, cfg.mi_workers);
}

Solver solver_for(const ExperimentConfig& cfg, SolverChoice fallback) {
  switch (cfg.solver == SolverChoice::Auto ? fallback : cfg.solver) {
    case SolverChoice::Anneal: {
      AnnealParams p;
      p.reads = cfg.reads;
      p.sweeps = cfg.sweeps;
      p.seed = cfg.seed;
      return [p](const QuboModel& q) { return simulated_anneal(q, p); };
    }
    case SolverChoice::Tabu: {
      TabuParams p;
      p.iters = cfg.tabu_iters;
      p.tenure = cfg.tabu_tenure;
      p.seed = cfg.seed;
      return [p](const QuboModel& q) { return tabu(q, p); };
    }
    case SolverChoice::Exhaustive:
      return [](const QuboModel& q) { return exhaustive(q); };
    default: {
      PartitionParams p;
      p.subproblem_size = cfg.subproblem_size;
      p.seed = cfg.seed;
      return [p](const QuboModel& q) { return partitioned_solve(q, p); };
    }
  }
}

void print_best(const SampleSet& s) {
  const Sample& top = best(s);
  std::cout << "best energy " << format_double(top.energy) << ", weight "
            << hamming_weight(top.x) << ", records " << s.records().size() << ", occurrences "
            << s.total_occurrences() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutual-information QUBO pixel selection and reconstruction"};
  app.require_subcommand(1);
  std::string stage = "cli";

  // ingest
  ConfigFlags ingest_flags;
  std::string save_dir;
  auto* ingest_cmd = app.add_subcommand("ingest", "Load or synthesize images and summarize them");
  ingest_flags.attach(ingest_cmd);
  ingest_cmd->add_option("--save-dir", save_dir, "Write the data as IDX files here");

  // mi
  ConfigFlags mi_flags;
  std::string mi_out, mi_csv;
  auto* mi_cmd = app.add_subcommand("mi", "Bin the training split and compute MI terms");
  mi_flags.attach(mi_cmd);
  mi_cmd->add_option("--out", mi_out, "MI terms file")->required();
  mi_cmd->add_option("--csv", mi_csv, "Optional feature,importance CSV");

  // build-qubo
  ConfigFlags build_flags;
  std::string build_mi, build_out;
  bool build_unconstrained = false;
  auto* build_cmd = app.add_subcommand("build-qubo", "Assemble a QUBO from MI terms");
  build_flags.attach(build_cmd);
  build_cmd->add_option("--mi", build_mi, "MI terms file")->required();
  build_cmd->add_option("--out", build_out, "QUBO file")->required();
  build_cmd->add_flag("--unconstrained", build_unconstrained, "Skip the constraint term");

  // sparsify
  ConfigFlags sparse_flags;
  std::string sparse_mi, sparse_out, sparse_mask;
  auto* sparse_cmd =
      app.add_subcommand("sparsify", "Subsample 2x2 blocks and threshold couplings");
  sparse_flags.attach(sparse_cmd);
  sparse_cmd->add_option("--mi", sparse_mi, "MI terms file")->required();
  sparse_cmd->add_option("--out", sparse_out, "Reduced unconstrained QUBO file")->required();
  sparse_cmd->add_option("--mask-out", sparse_mask, "Subsample mask file");

  // solve
  ConfigFlags solve_flags;
  std::string solve_qubo, solve_out;
  auto* solve_cmd = app.add_subcommand("solve", "Minimize a QUBO file");
  solve_flags.attach(solve_cmd);
  solve_cmd->add_option("--qubo", solve_qubo, "QUBO file")->required();
  solve_cmd->add_option("--out", solve_out, "Sampleset CSV");

  // tune
  ConfigFlags tune_flags;
  std::string tune_qubo, tune_out;
  auto* tune_cmd = app.add_subcommand("tune", "Bisect the linear penalty weight on a base QUBO");
  tune_flags.attach(tune_cmd);
  tune_cmd->add_option("--qubo", tune_qubo, "Unconstrained QUBO file")->required();
  tune_cmd->add_option("--out", tune_out, "Sampleset CSV of the chosen probe");

  // select
  ConfigFlags select_flags;
  std::string select_mi, select_out;
  auto* select_cmd = app.add_subcommand("select", "Run one method's pixel selection");
  select_flags.attach(select_cmd);
  select_cmd->add_option("--mi", select_mi, "Cached MI terms file");
  select_cmd->add_option("--out", select_out, "Mask file")->required();

  // train
  ConfigFlags train_flags;
  std::string train_mask, train_ckpt;
  auto* train_cmd = app.add_subcommand("train", "Train the decoder on a mask");
  train_flags.attach(train_cmd);
  train_cmd->add_option("--mask", train_mask, "Mask file")->required();
  train_cmd->add_option("--checkpoint", train_ckpt, "Checkpoint prefix")->required();

  // eval
  ConfigFlags eval_flags;
  std::string eval_mask, eval_ckpt;
  auto* eval_cmd = app.add_subcommand("eval", "Test MSE of a checkpoint");
  eval_flags.attach(eval_cmd);
  eval_cmd->add_option("--mask", eval_mask, "Mask file")->required();
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint prefix")->required();

  // run
  ConfigFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Full pipeline over all repeats");
  run_flags.attach(run_cmd);

  // report
  std::vector<std::string> report_files;
  auto* report_cmd = app.add_subcommand("report", "Summarize report CSV files");
  report_cmd->add_option("csv", report_files, "report.csv files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (ingest_cmd->parsed()) {
      stage = "ingest";
      const ExperimentConfig cfg = ingest_flags.resolve();
      const Datasets data = load_datasets(cfg);
      print_dataset("train", data.train);
      print_dataset("test", data.test);
      if (!save_dir.empty()) {
        const std::filesystem::path dir = save_dir;
        std::filesystem::create_directories(dir);
        save_idx(data.train, dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte");
        save_idx(data.test, dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte");
      }
    } else if (mi_cmd->parsed()) {
      stage = "mi";
      const ExperimentConfig cfg = mi_flags.resolve();
      const Datasets data = load_datasets(cfg);
      const MiTerms mi = compute_mi(data.train, cfg.bins, cfg.mi_workers);
      save_mi_terms(mi, mi_out);
      if (!mi_csv.empty()) {
        auto csv = open_out(mi_csv);
        csv << "feature,importance\n";
        for (std::size_t i = 0; i < mi.importance.values.size(); ++i)
          csv << i << ',' << format_double(mi.importance.values[i]) << '\n';
      }
      const auto& v = mi.importance.values;
      std::cout << "features " << v.size() << ", max importance "
                << *std::max_element(v.begin(), v.end()) << " nats\n";
    } else if (build_cmd->parsed()) {
      stage = "build-qubo";
      const ExperimentConfig cfg = build_flags.resolve();
      const MiTerms mi = load_mi_terms(build_mi);
      ConstraintKind constraint = NoConstraint{};
      if (!build_unconstrained) {
        if (cfg.constraint == ConstraintChoice::Quadratic) {
          constraint = QuadraticConstraint{
              cfg.alpha ? *cfg.alpha : auto_quadratic_alpha(mi, cfg.k, cfg.alpha_margin), cfg.k};
        } else {
          if (!cfg.alpha) throw ConsistencyError("linear constraint needs an explicit --alpha");
          constraint = LinearPenalty{*cfg.alpha, cfg.k};
        }
      }
      const QuboModel q = assemble(mi.importance, mi.redundancy, constraint);
      save_qubo(q, build_out);
      print_degree_report(std::cout, degree_report(q));
    } else if (sparse_cmd->parsed()) {
      stage = "sparsify";
      const ExperimentConfig cfg = sparse_flags.resolve();
      const MiTerms mi = load_mi_terms(sparse_mi);
      const auto width =
          static_cast<std::size_t>(std::lround(std::sqrt(mi.importance.values.size())));
      const SelectionMask sub = subsample_2x2(mi.importance, width);
      const auto [imp, red] = restrict_terms(mi.importance, mi.redundancy, sub);
      const QuboModel q = threshold_couplings(assemble(imp, red, NoConstraint{}), cfg.keep);
      save_qubo(q, sparse_out);
      if (!sparse_mask.empty()) save_mask(sub, sparse_mask);
      print_degree_report(std::cout, degree_report(q));
    } else if (solve_cmd->parsed()) {
      stage = "solve";
      const ExperimentConfig cfg = solve_flags.resolve();
      const SampleSet s = solver_for(cfg, SolverChoice::Partitioned)(load_qubo(solve_qubo));
      print_best(s);
      if (!solve_out.empty()) {
        auto out = open_out(solve_out);
        write_sampleset_csv(out, s);
      }
    } else if (tune_cmd->parsed()) {
      stage = "tune";
      const ExperimentConfig cfg = tune_flags.resolve();
      TuneOptions opts;
      opts.max_steps = cfg.tune_steps;
      opts.alpha_max = cfg.alpha_max;
      const TuneResult r =
          tune_alpha(load_qubo(tune_qubo), cfg.k, solver_for(cfg, SolverChoice::Anneal), opts);
      for (const auto& p : r.probes)
        std::cout << "alpha " << format_double(p.alpha) << " weight " << p.weight << " energy "
                  << format_double(p.energy) << '\n';
      std::cout << "chosen alpha " << format_double(r.alpha) << '\n';
      print_best(r.samples);
      if (!tune_out.empty()) {
        auto out = open_out(tune_out);
        write_sampleset_csv(out, r.samples);
      }
    } else if (select_cmd->parsed()) {
      stage = "select";
      const ExperimentConfig cfg = select_flags.resolve();
      std::size_t width = 0;
      MiTerms mi;
      if (cfg.method == Method::FullQubo || cfg.method == Method::ReducedQubo) {
        mi = mi_for(cfg, select_mi, width);
      } else {
        width = load_datasets(cfg).train.width;
      }
      const Selection sel = select_features(cfg, mi, width, cfg.seed);
      save_mask(sel.mask, select_out);
      std::cout << "selected " << sel.mask.size() << " pixels (solver weight " << sel.raw_weight
                << ")\n";
    } else if (train_cmd->parsed()) {
      stage = "train";
      const ExperimentConfig cfg = train_flags.resolve();
      const Datasets data = load_datasets(cfg);
      TrainConfig tc;
      tc.learning_rate = cfg.learning_rate;
      tc.epochs = cfg.epochs;
      tc.batch_size = cfg.batch_size;
      tc.seed = cfg.seed;
      const TrainResult r = train_decoder(data.train, load_mask(train_mask), tc);
      for (std::size_t e = 0; e < r.epoch_loss.size(); ++e)
        std::cout << "epoch " << e + 1 << " loss " << r.epoch_loss[e] << '\n';
      save_checkpoint(r.model, train_ckpt);
    } else if (eval_cmd->parsed()) {
      stage = "eval";
      const ExperimentConfig cfg = eval_flags.resolve();
      const Datasets data = load_datasets(cfg);
      const double mse = eval_mse(load_checkpoint(eval_ckpt), data.test, load_mask(eval_mask));
      std::cout << "test_mse " << format_double(mse) << '\n';
    } else if (run_cmd->parsed()) {
      stage = "run";
      run_pipeline(run_flags.resolve(), &std::cout);
    } else if (report_cmd->parsed()) {
      stage = "report";
      std::vector<RunResult> runs;
      for (const auto& f : report_files) {
        auto part = load_report_csv(f);
        runs.insert(runs.end(), part.begin(), part.end());
      }
      for (const auto& r : summarize_by_method(runs)) std::cout << summary_line(r) << '\n';
    }
  } catch (const StageError& e) {
    std::cerr << "qfs: error [" << e.stage() << "] " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qfs: error [" << stage << "] " << e.what() << '\n';
    return 2;
  }
  return 0;
}
