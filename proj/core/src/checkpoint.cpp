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
#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "qfs/errors.hpp"
#include "qfs/recon.hpp"

namespace qfs {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoints are little-endian float32");

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
  return std::filesystem::path(prefix.string() + suffix);
}

}  // namespace

// Manifest layout:
//   qfs-decoder 1
//   shape <inputs> <c1> <c2> <base>
//   tensor <name> <rows> <cols> <offset>   (offset in floats, one line per tensor)
void save_checkpoint(const DecoderModel& model, const std::filesystem::path& prefix) {
  std::ofstream bin(with_suffix(prefix, ".bin"), std::ios::binary);
  std::ofstream man(with_suffix(prefix, ".manifest"));
  if (!bin || !man) throw IoError("cannot write checkpoint " + prefix.string());
  const DecoderShape& s = model.shape();
  man << "qfs-decoder 1\n"
      << "shape " << s.inputs << ' ' << s.c1 << ' ' << s.c2 << ' ' << s.base << '\n';
  std::size_t offset = 0;
  const auto tensors = model.tensors();
  for (std::size_t t = 0; t < kDecoderTensors; ++t) {
    const auto& m = *tensors[t];
    man << "tensor " << kDecoderTensorNames[t] << ' ' << m.rows() << ' ' << m.cols() << ' '
        << offset << '\n';
    bin.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(float)));
    offset += static_cast<std::size_t>(m.size());
  }
  if (!bin || !man) throw IoError("short write on checkpoint " + prefix.string());
}

DecoderModel load_checkpoint(const std::filesystem::path& prefix) {
  std::ifstream man(with_suffix(prefix, ".manifest"));
  std::ifstream bin(with_suffix(prefix, ".bin"), std::ios::binary);
  if (!man || !bin) throw IoError("cannot open checkpoint " + prefix.string());

  std::string word;
  int version = 0;
  if (!(man >> word >> version) || word != "qfs-decoder" || version != 1)
    throw FormatError("bad checkpoint manifest header");
  DecoderShape shape;
  if (!(man >> word >> shape.inputs >> shape.c1 >> shape.c2 >> shape.base) || word != "shape")
    throw FormatError("bad checkpoint shape line");

  DecoderModel model(shape);
  auto tensors = model.tensors();
  std::size_t expected_offset = 0;
  for (std::size_t t = 0; t < kDecoderTensors; ++t) {
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    std::size_t offset = 0;
    if (!(man >> tag >> name >> rows >> cols >> offset) || tag != "tensor")
      throw FormatError("bad checkpoint tensor line");
    auto& m = *tensors[t];
    if (name != kDecoderTensorNames[t] || rows != m.rows() || cols != m.cols() ||
        offset != expected_offset)
      throw ConsistencyError("checkpoint tensor " + name + " does not match its shape");
    bin.read(reinterpret_cast<char*>(m.data()),
             static_cast<std::streamsize>(m.size() * sizeof(float)));
    if (!bin) throw IoError("checkpoint data truncated at " + name);
    expected_offset += static_cast<std::size_t>(m.size());
  }
  if (bin.peek() != std::char_traits<char>::eof())
    throw ConsistencyError("checkpoint data has trailing bytes");
  return model;
}

void write_pgm(const std::filesystem::path& path, std::span<const float> pixels,
               std::size_t width) {
  if (width == 0 || pixels.size() % width != 0)
    throw ConsistencyError("pixel count is not a multiple of the width");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << pixels.size() / width << "\n255\n";
  for (float p : pixels) {
    const float c = std::clamp(p, 0.0f, 1.0f);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0f))));
  }
  if (!out) throw IoError("short write on " + path.string());
}

}  // namespace qfs
