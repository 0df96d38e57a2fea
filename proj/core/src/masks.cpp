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
#include "qfs/mask.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "qfs/errors.hpp"
#include "qfs/text.hpp"

namespace qfs {

void SelectionMask::validate() const {
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= original_n) throw IndexError("mask index out of range");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw ConsistencyError("mask indices must be strictly increasing");
  }
}

SelectionMask identity_mask(std::size_t n) {
  SelectionMask m;
  m.original_n = n;
  m.indices.resize(n);
  std::iota(m.indices.begin(), m.indices.end(), std::size_t{0});
  return m;
}

SelectionMask compose(const SelectionMask& outer, std::span<const std::size_t> inner) {
  SelectionMask m;
  m.original_n = outer.original_n;
  m.provenance = outer.provenance;
  m.indices.reserve(inner.size());
  for (auto i : inner) {
    if (i >= outer.indices.size()) throw IndexError("inner mask index out of range");
    m.indices.push_back(outer.indices[i]);
  }
  m.validate();
  return m;
}

SelectionMask mask_from_bits(const SelectionMask& domain, std::span<const std::uint8_t> x,
                             const std::string& step) {
  if (x.size() != domain.indices.size())
    throw ConsistencyError("bit vector does not match mask domain");
  std::vector<std::size_t> inner;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i]) inner.push_back(i);
  auto m = compose(domain, inner);
  m.provenance.push_back(step);
  return m;
}

SelectionMask random_mask(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k > n) throw ConsistencyError("cannot draw more indices than features");
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with an explicit distribution so the draw does not
  // depend on the standard library's shuffle.
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  SelectionMask m;
  m.original_n = n;
  m.indices.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(m.indices.begin(), m.indices.end());
  m.provenance = {"random"};
  return m;
}

SelectionMask grid_mask(std::size_t width, std::size_t k) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(k))));
  if (r * r != k) throw ConsistencyError("grid mask needs a perfect-square k");
  if (r > width) throw ConsistencyError("grid is larger than the image");
  std::vector<std::size_t> coords(r);
  for (std::size_t i = 0; i < r; ++i) coords[i] = (2 * i + 1) * width / (2 * r);
  SelectionMask m;
  m.original_n = width * width;
  for (auto row : coords)
    for (auto col : coords) m.indices.push_back(row * width + col);
  m.provenance = {"grid"};
  m.validate();
  return m;
}

void write_mask(std::ostream& out, const SelectionMask& m) {
  out << "# original_n " << m.original_n << '\n';
  for (const auto& step : m.provenance) out << "# step " << step << '\n';
  for (auto i : m.indices) out << i << '\n';
}

SelectionMask read_mask(std::istream& in) {
  SelectionMask m;
  bool have_n = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields[0].starts_with('#')) {
      if (fields.size() == 3 && fields[1] == "original_n") {
        m.original_n = parse_size(fields[2]);
        have_n = true;
      } else if (fields.size() >= 3 && fields[1] == "step") {
        m.provenance.push_back(fields[2]);
      }
      continue;
    }
    if (fields.size() != 1) throw FormatError("mask line must hold a single index");
    m.indices.push_back(parse_size(fields[0]));
  }
  if (!have_n) throw FormatError("mask file lacks '# original_n' header");
  m.validate();
  return m;
}

void save_mask(const SelectionMask& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_mask(out, m);
}

SelectionMask load_mask(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_mask(in);
}

}  // namespace qfs
