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

#include "ccdl/types.hpp"

#include <cstdint>
#include <string_view>

namespace ccdl {

/// Operating point of a (G, Q)-scheme. The stream ratio c = Q/L is stored
/// as a real so the optimizer can treat it as continuous.
struct RateInputs {
    int G = 1;
    double c = 0.0;
    int L = 1;
    double p_t = 0.0;

    static RateInputs from_streams(int G, int Q, int L, double p_t);
    static RateInputs from_ratio(int G, double c, int L, double p_t);

    double streams() const { return c * L; }
    /// P_t / (P_t + G)
    double omega() const { return p_t / (p_t + G); }
};

// Average sum-rates, in nats per channel use.
double mf_rate(const RateInputs& in);
double mf_cacheless(double c_prime, int L, double p_t);
/// Exact for every finite L; throws COutOfRange unless 0 < c < 1.
double zf_rate(const RateInputs& in);
double rzf_rate(const RateInputs& in);
double raw_rate(Precoder p, const RateInputs& in);

/// Limit of (1/L) Tr{(z I + (1/L) H^H H)^{-1}} for aspect ratio c = Q/L.
double stieltjes(double c, double z);
/// dS_c/dz, always <= 0.
double stieltjes_deriv(double c, double z);

/// Deterministic equivalents for RZF with alpha = L / P_t.
struct RzfDeterministics {
    double a = 0.0;     // limit of A_k, equals S_c(1/P_t)
    double s = 0.0;     // S_c(1/P_t)
    double ds = 0.0;    // dS_c/dz at 1/P_t
    double b = 0.0;     // limit of B_k: a + ds / P_t
    double p_sq = 0.0;  // limit of the power factor rho^2: P_t / b
    bool beyond_theory = false;  // c > 1: outside the regime the limits were derived for
};

RzfDeterministics rzf_deterministics(double c, double p_t);

/// The power-factor limit written out in closed form, without going through
/// b. Kept separate so the two evaluation paths can be compared.
double rzf_power_closed_form(double c, double p_t);

/// Limit SINR of every RZF user: (a^2 p^2 / G) / ((1 + a)^2 + P_t / G).
double rzf_sinr(const RateInputs& in);

/// Pilot cost of acquiring CSI, in resources per user per coherence block.
struct CsiCostModel {
    double beta_tot = 10.0;
    double t_c = 0.04;    // s
    double w_c = 300e3;   // Hz

    /// beta_tot * G * L / (T_c W_c); independent of Q.
    double zeta(int G, int L) const;
};

double csi_zeta(const CsiCostModel& model, int G, int L);

enum class RateSource { ClosedForm, MonteCarlo };

std::string_view to_string(RateSource s);

struct RateReport {
    Precoder precoder = Precoder::MF;
    int G = 1;
    double Q = 0.0;
    int L = 1;
    double snr_db = 0.0;
    double c = 0.0;
    double avg_sum_rate_nats = 0.0;
    double zeta = 0.0;
    double effective_rate_nats = 0.0;
    RateSource source = RateSource::ClosedForm;
    int trials = 0;
    std::uint64_t seed = 0;
};

/// (1 - c*zeta) times the raw rate; throws CsiOverheadExceedsBlock if c*zeta > 1.
RateReport effective_rate(Precoder p, const RateInputs& in, const CsiCostModel& model);
RateReport effective_rate_with_zeta(Precoder p, const RateInputs& in, double zeta);

/// Effective rate ratio of a (G, Q) scheme over the cacheless (1, Q') one,
/// evaluated from the per-precoder gain expressions (with the xi factor).
double effective_gain(Precoder p, int G, int Q, int Q_prime, int L, double p_t,
                      const CsiCostModel& model);

}  // namespace ccdl
