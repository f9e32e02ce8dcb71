/*
 * Copyright 2026 The impactx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IMPACTX_ERRORS_H_
#define IMPACTX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace impactx {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value. `field()` names the offending field path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Stored digest or checksum does not match the content.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss during optimization.
class TrainingError : public Error {
 public:
  using Error::Error;
};

// Problem too large for an exact algorithm.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient regression design in KernelSHAP.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

}  // namespace impactx

#endif  // IMPACTX_ERRORS_H_
