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

#include "ccdl/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace ccdl {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// One Rayleigh realization for a group: row k is h_k^T of user k, so the
/// matrix is Q x L with i.i.d. CN(0,1) entries.
struct ChannelMatrix {
    CMatrix h;

    int users() const { return static_cast<int>(h.rows()); }
    int antennas() const { return static_cast<int>(h.cols()); }
};

/// Fills row by row from the stream, continuing where it left off.
ChannelMatrix draw_channel(int Q, int L, RandomStream& stream);
ChannelMatrix draw_channel(int Q, int L, RngSeed rng);

/// H with row k removed (H_{-k}).
CMatrix without_row(const CMatrix& h, int k);

/// Cholesky of a Gram matrix with a relative pivot check; false when the
/// matrix is numerically singular (min/max pivot ratio below 1e-14).
bool factor_gram(const CMatrix& gram, Eigen::LLT<CMatrix>& llt);

struct InverseTraceEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int trials = 0;
    int resampled = 0;  // singular draws replaced by a fresh substream
};

/// Monte Carlo E{Tr{(H H^H)^{-1}}} for Q x L Rayleigh H; trial t draws from
/// trial_stream(seed, t). Requires L > Q. Converges to Q / (L - Q).
InverseTraceEstimate wishart_inv_trace_mc(int Q, int L, int trials, std::uint64_t seed);

/// (1/L) Tr{(z I_L + (1/L) H^H H)^{-1}} from the spectrum of the smaller Gram.
double resolvent_trace(const CMatrix& h, double z);

/// (1/L) Tr{(z I_L + (1/L) H^H H)^{-2}}.
double resolvent_trace_sq(const CMatrix& h, double z);

}  // namespace ccdl
