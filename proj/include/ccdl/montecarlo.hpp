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

#include "ccdl/precoding.hpp"
#include "ccdl/scheme.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ccdl {

struct McConfig {
    int trials = 1000;
    std::uint64_t seed = 0;
    ValidatedScheme scheme;
    PrecoderKind precoder;
    /// MonteCarlo with trials == 0 estimates E{Tr V^H V} on the same trial
    /// set as the rates (two passes over stored per-user terms).
    PowerSpec power;

    /// Precoder taken from the scheme, default normalization for it.
    static McConfig make(const ValidatedScheme& scheme, int trials, std::uint64_t seed);
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;  // sample std / sqrt(trials)
    int trials = 0;
    int resampled = 0;
    double rho_sq = 0.0;
    std::vector<std::string> warnings;
};

/// Mean over trials of the stage sum sum_{G*Q users} ln(1 + SINR), in nats.
/// Singular ZF draws are redrawn from a fresh substream; more than 0.1% of
/// redraws fails with RankDeficient.
McEstimate estimate_sum_rate(const McConfig& mc);

struct ConvergenceRow {
    int L = 0;
    int Q = 0;
    double empirical = 0.0;
    double std_error = 0.0;
    double analytic = 0.0;
    double rel_gap = 0.0;
};

/// One row per L at fixed c (c*L must be an integer for every L).
std::vector<ConvergenceRow> convergence_report(Precoder p, double c, int G, double snr_db,
                                               const std::vector<int>& Ls, int trials,
                                               std::uint64_t seed);

struct DeterministicCheck {
    double a_emp = 0.0;
    double std_error = 0.0;
    double a_theory = 0.0;
    double gap = 0.0;  // relative
};

/// Sample mean of h_1^T (alpha I + H_{-1}^H H_{-1})^{-1} h_1^* with
/// alpha = L/P_t and Q = max(1, round(c L)), against S_{Q/L}(1/P_t).
DeterministicCheck deterministic_equivalent_check(double c, double p_t, int L, int trials,
                                                  std::uint64_t seed);

}  // namespace ccdl
