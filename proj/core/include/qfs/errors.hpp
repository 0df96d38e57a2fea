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

#include <stdexcept>
#include <string>
#include <utility>

namespace qfs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents (bad magic, unparsable line, duplicate entry).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Shapes or sizes that do not agree with each other.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Problem too large for the requested algorithm.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class EmptyError : public Error {
 public:
  using Error::Error;
};

// Wraps a failure with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace qfs
