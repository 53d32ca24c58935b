// Copyright 2026 The kgxbench Authors
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

#ifndef KGXBENCH_CORE_ERROR_HPP_
#define KGXBENCH_CORE_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgxb {

// Numeric values are shared with the C API status codes.
enum class ErrorCode : int {
  kArgument = 1,
  kParse = 2,
  kValidation = 3,
  kReference = 4,
  kRange = 5,
  kIo = 6,
  kConfig = 7,
  kTransport = 8,
  kExplanation = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& m) : Error(ErrorCode::kArgument, m) {}
};

// Carries the 1-based line (or CSV row) number the problem was found on.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& m)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + m),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error(ErrorCode::kValidation, m) {}
};

class ReferenceError : public Error {
 public:
  explicit ReferenceError(const std::string& m) : Error(ErrorCode::kReference, m) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& m) : Error(ErrorCode::kRange, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorCode::kIo, m) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorCode::kConfig, m) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& m) : Error(ErrorCode::kTransport, m) {}
};

class ExplanationFailure : public Error {
 public:
  explicit ExplanationFailure(const std::string& m) : Error(ErrorCode::kExplanation, m) {}
};

}  // namespace kgxb

#endif  // KGXBENCH_CORE_ERROR_HPP_
