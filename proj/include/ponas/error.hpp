// Copyright 2026 The ponas Authors
//
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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ponas {

/// Base class of every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong gene-vector length, unknown block index, bad
/// configuration values.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// The cost ceiling rejects even the cheapest architecture.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::int64_t cheapest_cost)
      : Error(what), cheapest_cost_(cheapest_cost) {}

  std::int64_t cheapest_cost() const noexcept { return cheapest_cost_; }

 private:
  std::int64_t cheapest_cost_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose content breaks an invariant (accuracy outside
/// [0,1], dimension mismatch, malformed table document).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ponas
