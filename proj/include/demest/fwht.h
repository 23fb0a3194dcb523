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

#ifndef DEMEST_FWHT_H
#define DEMEST_FWHT_H

#include <span>
#include <vector>

namespace demest {

/// In-place unnormalized Walsh-Hadamard butterfly, O(len·log len):
///     v[y] <- sum_x (-1)^(x·y) v[x].
/// Applying it twice multiplies by len. Length must be a power of two.
/// Kept separate so callers can fold normalization constants in once at the
/// end instead of accumulating rounding through the butterfly stages.
void fwht_unnormalized(std::span<double> values);

/// The orthonormal transform H = 2^(-N/2)·[(-1)^(x·y)]; self-inverse.
void fwht(std::span<double> values);

/// Convenience copy of fwht.
std::vector<double> fwht_copy(std::vector<double> values);

}  // namespace demest

#endif
