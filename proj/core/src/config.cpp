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
#include "qfs/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <string>

#include "qfs/errors.hpp"
#include "qfs/text.hpp"

namespace qfs {
namespace {

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view key, std::string_view value,
                const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, e] : table)
    if (name == value) return e;
  throw FormatError("bad value '" + std::string(value) + "' for " + std::string(key));
}

constexpr std::array<std::pair<std::string_view, Method>, 4> kMethods{{
    {"random", Method::Random},
    {"grid", Method::Grid},
    {"full-qubo", Method::FullQubo},
    {"reduced-qubo", Method::ReducedQubo},
}};
constexpr std::array<std::pair<std::string_view, ConstraintChoice>, 2> kConstraints{{
    {"quadratic", ConstraintChoice::Quadratic},
    {"linear", ConstraintChoice::Linear},
}};
constexpr std::array<std::pair<std::string_view, SolverChoice>, 5> kSolvers{{
    {"auto", SolverChoice::Auto},
    {"partitioned", SolverChoice::Partitioned},
    {"anneal", SolverChoice::Anneal},
    {"tabu", SolverChoice::Tabu},
    {"exhaustive", SolverChoice::Exhaustive},
}};
constexpr std::array<std::pair<std::string_view, DecoderChoice>, 2> kDecoders{{
    {"conv", DecoderChoice::Conv},
    {"ridge", DecoderChoice::Ridge},
}};

template <class Enum, std::size_t N>
std::string_view enum_name(Enum e, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [name, v] : table)
    if (v == e) return name;
  return "?";
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw FormatError("not a boolean: '" + std::string(v) + "'");
}

std::optional<double> parse_optional(std::string_view v) {
  if (v.empty() || v == "auto") return std::nullopt;
  return parse_double(v);
}

std::string show_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("auto");
}

std::vector<std::size_t> parse_list(std::string_view v) {
  std::vector<std::size_t> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(parse_size(trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

std::string show_list(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

struct Field {
  std::string_view name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define QFS_SIZE(key, member)                                                        \
  Field {                                                                            \
    key, [](ExperimentConfig& c, std::string_view v) { c.member = parse_size(v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }          \
  }
#define QFS_REAL(key, member)                                                          \
  Field {                                                                              \
    key, [](ExperimentConfig& c, std::string_view v) { c.member = parse_double(v); }, \
        [](const ExperimentConfig& c) { return format_double(c.member); }             \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"data_dir", [](ExperimentConfig& c, std::string_view v) { c.data_dir = std::string(v); },
       [](const ExperimentConfig& c) { return c.data_dir.string(); }},
      {"synth", [](ExperimentConfig& c, std::string_view v) { c.synth = parse_bool(v); },
       [](const ExperimentConfig& c) { return std::string(c.synth ? "true" : "false"); }},
      QFS_SIZE("synth_samples", synth_spec.num_samples),
      QFS_SIZE("synth_width", synth_spec.width),
      QFS_SIZE("synth_classes", synth_spec.num_classes),
      {"synth_informative",
       [](ExperimentConfig& c, std::string_view v) {
         c.synth_spec.informative_pixels = parse_list(v);
       },
       [](const ExperimentConfig& c) { return show_list(c.synth_spec.informative_pixels); }},
      QFS_REAL("synth_noise", synth_spec.noise_std),
      QFS_SIZE("synth_seed", synth_spec.seed),
      QFS_SIZE("synth_test_samples", synth_test_samples),
      QFS_SIZE("train_limit", train_limit),
      QFS_SIZE("test_limit", test_limit),
      QFS_SIZE("bins", bins),
      QFS_SIZE("k", k),
      {"method",
       [](ExperimentConfig& c, std::string_view v) { c.method = parse_enum("method", v, kMethods); },
       [](const ExperimentConfig& c) { return std::string(to_string(c.method)); }},
      {"constraint",
       [](ExperimentConfig& c, std::string_view v) {
         c.constraint = parse_enum("constraint", v, kConstraints);
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.constraint)); }},
      {"alpha", [](ExperimentConfig& c, std::string_view v) { c.alpha = parse_optional(v); },
       [](const ExperimentConfig& c) { return show_optional(c.alpha); }},
      QFS_REAL("alpha_margin", alpha_margin),
      {"alpha_max",
       [](ExperimentConfig& c, std::string_view v) { c.alpha_max = parse_optional(v); },
       [](const ExperimentConfig& c) { return show_optional(c.alpha_max); }},
      QFS_SIZE("tune_steps", tune_steps),
      QFS_SIZE("keep", keep),
      {"mi_workers",
       [](ExperimentConfig& c, std::string_view v) {
         c.mi_workers = static_cast<unsigned>(parse_size(v));
       },
       [](const ExperimentConfig& c) { return std::to_string(c.mi_workers); }},
      {"solver",
       [](ExperimentConfig& c, std::string_view v) { c.solver = parse_enum("solver", v, kSolvers); },
       [](const ExperimentConfig& c) { return std::string(to_string(c.solver)); }},
      QFS_SIZE("reads", reads),
      QFS_SIZE("sweeps", sweeps),
      QFS_SIZE("tabu_iters", tabu_iters),
      QFS_SIZE("tabu_tenure", tabu_tenure),
      QFS_SIZE("subproblem_size", subproblem_size),
      {"decoder",
       [](ExperimentConfig& c, std::string_view v) {
         c.decoder = parse_enum("decoder", v, kDecoders);
       },
       [](const ExperimentConfig& c) { return std::string(to_string(c.decoder)); }},
      QFS_REAL("ridge_lambda", ridge_lambda),
      QFS_REAL("learning_rate", learning_rate),
      QFS_SIZE("epochs", epochs),
      QFS_SIZE("batch_size", batch_size),
      QFS_SIZE("previews", previews),
      QFS_SIZE("repeats", repeats),
      QFS_SIZE("seed", seed),
      {"out_dir", [](ExperimentConfig& c, std::string_view v) { c.out_dir = std::string(v); },
       [](const ExperimentConfig& c) { return c.out_dir.string(); }},
  };
  return table;
}

#undef QFS_SIZE
#undef QFS_REAL

}  // namespace

std::string_view to_string(Method m) { return enum_name(m, kMethods); }
std::string_view to_string(ConstraintChoice c) { return enum_name(c, kConstraints); }
std::string_view to_string(SolverChoice s) { return enum_name(s, kSolvers); }
std::string_view to_string(DecoderChoice d) { return enum_name(d, kDecoders); }

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  for (const auto& f : fields())
    if (f.name == key) {
      f.set(*this, trim(value));
      return;
    }
  throw FormatError("unknown config key '" + std::string(key) + "'");
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.name);
    return out;
  }();
  return names;
}

void ExperimentConfig::validate() const {
  if (bins < 2 || bins > 256) throw ConsistencyError("bins must lie in [2, 256]");
  if (k < 1) throw ConsistencyError("k must be >= 1");
  if (repeats < 1) throw ConsistencyError("repeats must be >= 1");
  if (reads < 1 || sweeps < 1) throw ConsistencyError("reads and sweeps must be >= 1");
  if (subproblem_size < 1 || subproblem_size > 24)
    throw ConsistencyError("subproblem_size must lie in [1, 24]");
  if (!(alpha_margin > 0.0)) throw ConsistencyError("alpha_margin must be > 0");
  if (alpha && !(*alpha >= 0.0)) throw ConsistencyError("alpha must be >= 0");
  if (alpha_max && !(*alpha_max > 0.0)) throw ConsistencyError("alpha_max must be > 0");
  if (!(ridge_lambda > 0.0)) throw ConsistencyError("ridge_lambda must be > 0");
  if (!(learning_rate > 0.0) || epochs < 1 || batch_size < 1)
    throw ConsistencyError("training hyperparameters must be positive");
  if (mi_workers < 1) throw ConsistencyError("mi_workers must be >= 1");
  if (synth) {
    synth_spec.validate();
    if (synth_test_samples < 1) throw ConsistencyError("synth_test_samples must be >= 1");
  } else if (data_dir.empty()) {
    throw ConsistencyError("either data_dir or synth must be set");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected key = value");
    try {
      cfg.set(trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  for (const auto& f : fields()) out << f.name << " = " << f.get(cfg) << '\n';
}

}  // namespace qfs
