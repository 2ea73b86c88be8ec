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

#include "ccdl/channel.hpp"
#include "ccdl/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ccdl {

struct PrecoderKind {
    Precoder type = Precoder::MF;
    double alpha = 0.0;  // RZF regularization

    static PrecoderKind mf() { return {Precoder::MF, 0.0}; }
    static PrecoderKind zf() { return {Precoder::ZF, 0.0}; }
    static PrecoderKind rzf(double alpha);
    /// RZF gets alpha = L / P_t.
    static PrecoderKind for_operating_point(Precoder p, int L, double p_t);
};

/// L x Q precoding matrix. Throws RankDeficient for ZF on a singular draw.
CMatrix build_precoder(const ChannelMatrix& H, const PrecoderKind& kind);

enum class PowerMode { Exact, Asymptotic, MonteCarlo };

struct PowerSpec {
    PowerMode mode = PowerMode::Exact;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// Default normalization used by simulations: closed form for MF and ZF,
/// a sample mean of the trace for RZF.
PowerMode default_power_mode(Precoder p);

/// rho^2 = P_t / E{Tr V^H V} for a Q x L group channel.
/// Exact: MF and ZF only (ExactUnavailable for RZF). Asymptotic: the RZF
/// deterministic equivalent (the exact value for MF and ZF).
double power_factor_sq(const PrecoderKind& kind, int Q, int L, double p_t, const PowerSpec& spec);
double power_factor(const PrecoderKind& kind, int Q, int L, double p_t, const PowerSpec& spec);

/// Unnormalized per-user quantities of one group: |h_k^T v_k|^2,
/// sum_{j != k} |h_k^T v_j|^2 and Tr V^H V.
struct GroupResponse {
    std::vector<double> signal;
    std::vector<double> interference;
    double power_trace = 0.0;
};

/// Works from the Q x Q Gram matrix; V itself is never formed.
GroupResponse group_response(const ChannelMatrix& H, const PrecoderKind& kind);

/// Appends scale*s/(1 + scale*i) for each user of r, scale = rho^2 / G.
void append_sinrs(const GroupResponse& r, double rho_sq, int G, std::vector<double>& out);

/// G*Q SINRs of one stage, group-major. Inter-group interference is absent:
/// every receiver removes it with its cached side information.
std::vector<double> stage_sinrs(std::span<const ChannelMatrix> channels, const PrecoderKind& kind,
                                double rho_sq);

/// Same quantity built from an explicit V and H*V.
std::vector<double> stage_sinrs_direct(std::span<const ChannelMatrix> channels,
                                       const PrecoderKind& kind, double rho_sq);

/// RZF SINR of every user of one group, through the leave-one-out
/// quantities A_k and B_k (L x L inverses of alpha I + H_{-k}^H H_{-k}).
std::vector<double> rzf_sinrs_loo(const ChannelMatrix& H, double alpha, double rho_sq, int G);

/// Simulates the received signal of every user of the stage with random
/// symbols and noise, cancels the inter-group component rebuilt from the
/// composite coefficients, and returns the largest deviation from the
/// intra-group-only signal, relative to that signal's magnitude.
double cancellation_residual(std::span<const ChannelMatrix> channels, const PrecoderKind& kind,
                             double rho_sq, RngSeed symbols);

}  // namespace ccdl
