// Copyright 2026 The softlogic Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace psl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An assignment or index does not match the model it is applied to.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A model violates one of its structural invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

std::string to_string(const SourceLocation& loc);

class ParseError : public Error {
 public:
  ParseError(SourceLocation loc, const std::string& message)
      : Error(to_string(loc) + ": " + message), location_(loc) {}

  const SourceLocation& location() const { return location_; }

 private:
  SourceLocation location_;
};

// Collects every per-rule failure of a grounding pass.
class GroundingError : public Error {
 public:
  explicit GroundingError(std::vector<std::string> messages);

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
};

// The model's constraint structure is outside what an algorithm supports.
class UnsupportedStructure : public Error {
 public:
  using Error::Error;
};

}  // namespace psl
