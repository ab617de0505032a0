// Copyright 2026 The walkbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace walkbench {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  kInvalidArgument,  // malformed input, descriptor mismatch, parse failure
  kPrecondition,     // e.g. aperiodicity required, coverage gap, n < n_0
  kBudget,           // support / radius / memory caps exhausted
  kNumerical,        // underflow or a non-convergent procedure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, "parse error: " + what) {}
};

class DescriptorMismatch : public Error {
 public:
  explicit DescriptorMismatch(const std::string& what)
      : Error(ErrorKind::kInvalidArgument, "descriptor mismatch: " + what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::kPrecondition, what) {}
};

class AperiodicityRequired : public PreconditionError {
 public:
  explicit AperiodicityRequired(int period)
      : PreconditionError("aperiodicity required (detected period " +
                          std::to_string(period) + ")") {}
};

class CoverageGap : public PreconditionError {
 public:
  explicit CoverageGap(const std::string& what)
      : PreconditionError("coverage gap: " + what) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(const std::string& what)
      : Error(ErrorKind::kBudget, "budget exceeded: " + what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace walkbench
