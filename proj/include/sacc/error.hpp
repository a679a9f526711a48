/**
 * Copyright 2026 The SACC Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SACC_ERROR_HPP_
#define SACC_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sacc {

// Invalid configuration or precondition on user-supplied settings.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Missing, corrupt or inconsistent dataset files.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf encountered, or an input outside the domain of a numerical routine.
class NumericalError : public std::domain_error {
 public:
  explicit NumericalError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace sacc

#endif  // SACC_ERROR_HPP_
