// Copyright 2026 The Fabrics Authors.
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

#ifndef FABRICS_ERRORS_H_
#define FABRICS_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fabrics {

class FabricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand sizes do not line up (spec dims, task map parent/child dims, ...).
class DimensionError : public FabricsError {
 public:
  using FabricsError::FabricsError;
};

// A value that must be finite, symmetric or PSD is not.
class InvalidValueError : public FabricsError {
 public:
  using FabricsError::FabricsError;
};

// A barrier coordinate reached x <= 0 (inside an obstacle or past a limit).
class BarrierDomainError : public FabricsError {
 public:
  BarrierDomainError(std::string where, double value)
      : FabricsError("barrier-domain violation at '" + where +
                     "': x = " + std::to_string(value)),
        where_(std::move(where)),
        value_(value) {}

  const std::string& where() const { return where_; }
  double value() const { return value_; }

 private:
  std::string where_;
  double value_;
};

// Scenario parse / schema errors. `line` is 1-based, 0 when unknown.
class ConfigError : public FabricsError {
 public:
  ConfigError(const std::string& file, int line, const std::string& message)
      : FabricsError(Format(file, line, message)), file_(file), line_(line) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  static std::string Format(const std::string& file, int line,
                            const std::string& message) {
    std::string out = file.empty() ? std::string("<scenario>") : file;
    if (line > 0) out += ":" + std::to_string(line);
    return out + ": " + message;
  }

  std::string file_;
  int line_;
};

}  // namespace fabrics

#endif  // FABRICS_ERRORS_H_
