// Copyright 2026 The qgnn-tracking Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Exception types shared by every module. The CLI maps them onto exit codes.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qgnn {

/// Malformed, missing or inconsistent input data (files, graphs, events).
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values or failed numerical checks.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

#define QGNN_REQUIRE(cond, msg)                                                \
    do {                                                                       \
        if (!(cond)) {                                                         \
            throw std::invalid_argument(msg);                                  \
        }                                                                      \
    } while (0)

} // namespace qgnn
