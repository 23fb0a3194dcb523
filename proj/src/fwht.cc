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

#include "demest/fwht.h"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace demest {

void fwht_unnormalized(std::span<double> values) {
    size_t len = values.size();
    if (len == 0 || !std::has_single_bit(len)) {
        throw std::invalid_argument("transform length must be a power of two");
    }
    for (size_t half = 1; half < len; half <<= 1) {
        for (size_t block = 0; block < len; block += 2 * half) {
            for (size_t i = block; i < block + half; i++) {
                double a = values[i];
                double b = values[i + half];
                values[i] = a + b;
                values[i + half] = a - b;
            }
        }
    }
}

void fwht(std::span<double> values) {
    fwht_unnormalized(values);
    double scale = 1.0 / std::sqrt((double)values.size());
    for (double &v : values) {
        v *= scale;
    }
}

std::vector<double> fwht_copy(std::vector<double> values) {
    fwht(values);
    return values;
}

}  // namespace demest
