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

#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace ccdl {

/// (seed, stream_id) names one independent random substream. Monte Carlo
/// trial t of a run with base seed s uses stream_id = t, so any trial can be
/// regenerated without touching the others.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

/// Substream for a resampled trial; attempt 0 is the trial's primary stream.
RngSeed trial_stream(std::uint64_t seed, std::uint64_t trial, std::uint32_t attempt = 0);

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Sequential uniform and circularly-symmetric Gaussian draws from one
/// substream. Block i of the stream is philox4x32({i, stream}, seed).
class RandomStream {
public:
    explicit RandomStream(RngSeed s);

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();

    /// CN(0,1): real and imaginary parts independent N(0, 1/2), by the
    /// Box-Muller transform of two uniforms.
    std::complex<double> complex_normal();

private:
    void refill();

    RngSeed id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> words_{};
    int next_ = 2;
};

}  // namespace ccdl
