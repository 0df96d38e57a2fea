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
#include "qfs/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "qfs/errors.hpp"
#include "qfs/text.hpp"

namespace qfs {
namespace {

VarPair canonical(std::size_t i, std::size_t j) { return i < j ? VarPair{i, j} : VarPair{j, i}; }

void check_finite(double v) {
  if (!std::isfinite(v)) throw ConsistencyError("QUBO coefficients must be finite");
}

}  // namespace

std::size_t hamming_weight(std::span<const std::uint8_t> x) {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](auto b) { return b != 0; }));
}

void QuboModel::set_linear(std::size_t i, double v) {
  check_finite(v);
  diag_.at(i) = v;
}

double QuboModel::coupling(std::size_t i, std::size_t j) const {
  auto it = couplings_.find(canonical(i, j));
  return it == couplings_.end() ? 0.0 : it->second;
}

void QuboModel::set_coupling(std::size_t i, std::size_t j, double v) {
  if (i == j) throw ConsistencyError("coupling needs two distinct variables");
  if (i >= size() || j >= size()) throw IndexError("coupling index out of range");
  check_finite(v);
  if (v == 0.0) {
    couplings_.erase(canonical(i, j));
  } else {
    couplings_[canonical(i, j)] = v;
  }
}

void QuboModel::add_coupling(std::size_t i, std::size_t j, double v) {
  set_coupling(i, j, coupling(i, j) + v);
}

double QuboModel::energy(std::span<const std::uint8_t> x) const {
  if (x.size() != size()) throw ConsistencyError("assignment length does not match QUBO size");
  double e = offset_;
  for (std::size_t i = 0; i < diag_.size(); ++i)
    if (x[i]) e += diag_[i];
  for (const auto& [key, v] : couplings_)
    if (x[key.first] && x[key.second]) e += v;
  return e;
}

Adjacency::Adjacency(const QuboModel& q) {
  const std::size_t n = q.size();
  std::vector<std::size_t> degree(n, 0);
  for (const auto& [key, v] : q.couplings()) {
    ++degree[key.first];
    ++degree[key.second];
  }
  offsets.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + degree[i];
  neighbors.resize(offsets[n]);
  weights.resize(offsets[n]);
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [key, v] : q.couplings()) {
    const auto [i, j] = key;
    neighbors[cursor[i]] = static_cast<std::uint32_t>(j);
    weights[cursor[i]++] = v;
    neighbors[cursor[j]] = static_cast<std::uint32_t>(i);
    weights[cursor[j]++] = v;
  }
}

double IsingModel::energy(std::span<const double> spins) const {
  if (spins.size() != h.size()) throw ConsistencyError("spin vector length mismatch");
  double e = offset;
  for (std::size_t i = 0; i < h.size(); ++i) e += h[i] * spins[i];
  for (const auto& [key, v] : J) e += v * spins[key.first] * spins[key.second];
  return e;
}

std::vector<double> spins_from_bits(std::span<const std::uint8_t> x) {
  std::vector<double> mu(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mu[i] = x[i] ? 0.5 : -0.5;
  return mu;
}

IsingModel to_ising(const QuboModel& q) {
  IsingModel m;
  m.h.assign(q.diagonal().begin(), q.diagonal().end());
  m.offset = q.offset();
  for (double d : q.diagonal()) m.offset += 0.5 * d;
  for (const auto& [key, v] : q.couplings()) {
    m.J[key] = v;
    m.h[key.first] += 0.5 * v;
    m.h[key.second] += 0.5 * v;
    m.offset += 0.25 * v;
  }
  return m;
}

void apply_constraint(QuboModel& q, const ConstraintKind& c) {
  const std::size_t n = q.size();
  if (const auto* quad = std::get_if<QuadraticConstraint>(&c)) {
    if (quad->alpha < 0.0) throw ConsistencyError("constraint weight must be >= 0");
    if (quad->k > n) throw ConsistencyError("k exceeds variable count");
    const double a = quad->alpha;
    const double k = static_cast<double>(quad->k);
    for (std::size_t i = 0; i < n; ++i) q.add_linear(i, a * (1.0 - 2.0 * k));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) q.add_coupling(i, j, 2.0 * a);
    q.add_offset(a * k * k);
  } else if (const auto* lin = std::get_if<LinearPenalty>(&c)) {
    if (lin->alpha < 0.0) throw ConsistencyError("penalty weight must be >= 0");
    if (lin->k > n) throw ConsistencyError("k exceeds variable count");
    for (std::size_t i = 0; i < n; ++i) q.add_linear(i, lin->alpha);
  }
}

QuboModel assemble(const ImportanceVector& importance, const RedundancyMatrix& redundancy,
                   const ConstraintKind& c) {
  const std::size_t n = importance.size();
  if (redundancy.size() != n)
    throw ConsistencyError("importance and redundancy dimensions differ");
  QuboModel q(n);
  for (std::size_t i = 0; i < n; ++i) q.set_linear(i, -importance[i]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (redundancy(i, j) != 0.0) q.set_coupling(i, j, redundancy(i, j));
  apply_constraint(q, c);
  return q;
}

void write_qubo(std::ostream& out, const QuboModel& q) {
  out << "qubo " << q.size() << ' ' << format_double(q.offset()) << '\n';
  for (std::size_t i = 0; i < q.size(); ++i)
    out << "d " << i << ' ' << format_double(q.linear(i)) << '\n';
  for (const auto& [key, v] : q.couplings())
    out << "c " << key.first << ' ' << key.second << ' ' << format_double(v) << '\n';
}

QuboModel read_qubo(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  QuboModel q;
  std::set<std::size_t> seen_diag;
  auto fail = [&](const std::string& what) -> FormatError {
    return FormatError("qubo line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].starts_with('#')) continue;
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "qubo") throw fail("expected 'qubo <n> <offset>'");
      q = QuboModel(parse_size(fields[1]), parse_double(fields[2]));
      have_header = true;
    } else if (fields[0] == "d") {
      if (fields.size() != 3) throw fail("expected 'd <i> <value>'");
      const auto i = parse_size(fields[1]);
      if (i >= q.size()) throw fail("diagonal index out of range");
      if (!seen_diag.insert(i).second) throw fail("duplicate diagonal entry");
      q.set_linear(i, parse_double(fields[2]));
    } else if (fields[0] == "c") {
      if (fields.size() != 4) throw fail("expected 'c <i> <j> <value>'");
      const auto i = parse_size(fields[1]);
      const auto j = parse_size(fields[2]);
      if (i >= j || j >= q.size()) throw fail("coupling indices must satisfy i < j < n");
      if (q.couplings().contains({i, j})) throw fail("duplicate coupling entry");
      const double v = parse_double(fields[3]);
      if (v == 0.0) throw fail("explicit zero coupling");
      q.set_coupling(i, j, v);
    } else {
      throw fail("unknown record '" + fields[0] + "'");
    }
  }
  if (!have_header) throw FormatError("qubo file has no header");
  return q;
}

void save_qubo(const QuboModel& q, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_qubo(out, q);
}

QuboModel load_qubo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_qubo(in);
}

}  // namespace qfs
