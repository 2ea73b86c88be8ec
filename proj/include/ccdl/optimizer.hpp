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

#include "ccdl/analytic.hpp"
#include "ccdl/types.hpp"

#include <functional>
#include <optional>
#include <string_view>

namespace ccdl {

/// Principal branch of the Lambert W function, x >= -1/e.
double lambert_w0(double x);

enum class OptMethod { RootBisection, GridSearch, LambertClosedForm };

std::string_view to_string(OptMethod m);

struct OptimizationResult {
    double c_star = 0.0;
    int q_star = 0;                         // 0 until integer_q has run
    double effective_rate_at_q_star = 0.0;  // nats
    OptMethod method = OptMethod::RootBisection;
    double residual = 0.0;                  // |d(objective)/dc| at c_star, up to a positive factor
    double c_star_r = 0.0;                  // ZF only: root without CSI cost
    bool b_unconstrained = true;            // no user-count limit applied to Q
};

/// Stationary point of (1 - zeta c) * mf_rate. Throws UnboundedObjective for zeta = 0.
OptimizationResult mf_opt_c(int G, double p_t, double zeta);

/// Stationary point of (1 - zeta c) * zf_rate on (0, min(1, 1/(2 zeta))).
OptimizationResult zf_opt_c(int G, double p_t, double zeta);

struct HighSnrStreams {
    double c_star = 0.0;
    bool low_snr = false;  // P_t < 10 G: the approximation is not expected to hold
};

/// (1 + 1/W(P_t/(e G)))^{-1}
HighSnrStreams zf_opt_c_high_snr(int G, double p_t);

/// Grid search with step 1e-3 over (0, 1), refined by golden section to 1e-6.
OptimizationResult rzf_opt_c(int G, int L, double p_t, const CsiCostModel& model);

/// Derivative expressions whose roots are the MF and ZF optima.
double mf_stationarity(double c, int G, double p_t, double zeta);
double zf_stationarity(double c, int G, double p_t, double zeta);

struct Feasibility {
    int q_min = 1;
    int q_max = 0;
};

/// Feasible stream counts: Q <= B when B is known, Q <= L - 1 for ZF (the
/// rate vanishes at Q = L), Q <= L for RZF, and c*zeta <= 1.
Feasibility stream_feasibility(Precoder p, int L, double zeta, std::optional<int> B);

struct IntegerChoice {
    int q_star = 0;
    double rate = 0.0;
};

/// Best of floor(c* L) and floor(c* L) + 1, each clamped into the feasible
/// range; ties go to the smaller Q.
IntegerChoice integer_q(double c_star, int L, const std::function<double(int)>& rate_fn,
                        const Feasibility& feasible);

/// Continuous optimum followed by the integer rule, for one side of the comparison.
OptimizationResult optimize_streams(Precoder p, int G, int L, double p_t, const CsiCostModel& model,
                                    std::optional<int> B = std::nullopt);

struct GainReport {
    Precoder precoder = Precoder::MF;
    int G = 1;
    int L = 1;
    double p_t = 0.0;
    double zeta_cached = 0.0;
    double zeta_cacheless = 0.0;
    OptimizationResult cached;
    OptimizationResult cacheless;
    double gain = 0.0;
};

/// Ratio of the best effective rate with caching gain G to the best
/// cacheless effective rate, each optimized over its own stream count.
GainReport optimized_gain(Precoder p, int G, int L, double p_t, const CsiCostModel& model,
                          std::optional<int> B = std::nullopt);

}  // namespace ccdl
