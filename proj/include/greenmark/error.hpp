// Copyright 2026 The greenmark Authors.
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

#include <stdexcept>
#include <string>

namespace greenmark {

// Base for every error the library raises. The CLI maps subclasses to exit
// codes (see tools/greenmark.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid construction parameter (gamma, vocab size, policy constants...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Numeric argument outside the function's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Vector lengths that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied data that violates a precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field_path, const std::string& what)
      : Error(field_path + ": " + what), field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Remote attack endpoint unreachable or replied with something unusable.
class AttackUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace greenmark
