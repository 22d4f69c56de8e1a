// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SECTORMIMO_RNG_HPP
#define SECTORMIMO_RNG_HPP

#include <cstdint>
#include <random>

namespace sectormimo {

/// Independent stream keyed by (seed, index, purpose). Streams never depend
/// on scheduling, so results are identical for any thread count.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, std::uint32_t purpose = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      purpose};
    return std::mt19937_64(seq);
}

enum StreamPurpose : std::uint32_t {
    kStreamDrop = 1,
    kStreamShadow = 2,
    kStreamTrial = 3,
};

}  // namespace sectormimo

#endif
