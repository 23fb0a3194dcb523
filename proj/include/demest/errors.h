// Copyright 2026 Demest Contributors
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

#ifndef DEMEST_ERRORS_H
#define DEMEST_ERRORS_H

#include <stdexcept>
#include <string>

namespace demest {

/// Malformed input file (model files, shot files). Maps to CLI exit code 2,
/// like std::invalid_argument / std::domain_error for bad parameters.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}
};

/// An estimation procedure could not produce a usable result (divergent
/// statistics, non-identifiable systems, capacity limits). Maps to CLI exit
/// code 3. These failures are loud by design: a silently wrong model is worse
/// than no model.
struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string &msg) : std::runtime_error(msg) {}
};

/// The requested events cannot be distinguished by the provided parities.
struct IdentifiabilityError : EstimationError {
    explicit IdentifiabilityError(const std::string &msg) : EstimationError(msg) {}
};

/// A search or enumeration would exceed a configured size cap.
struct CapacityError : EstimationError {
    explicit CapacityError(const std::string &msg) : EstimationError(msg) {}
};

}  // namespace demest

#endif
