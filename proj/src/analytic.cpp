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

#include "ccdl/analytic.hpp"

#include "ccdl/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace ccdl {

namespace {

void check_inputs(const RateInputs& in)
{
    if (in.G < 1) fail(ErrorCode::InvalidArgument, "G must be >= 1");
    if (in.L < 1) fail(ErrorCode::InvalidArgument, "L must be >= 1");
    if (!(in.c > 0.0) || !std::isfinite(in.c)) fail(ErrorCode::InvalidArgument, "c must be > 0");
    if (!(in.p_t >= 0.0) || !std::isfinite(in.p_t))
        fail(ErrorCode::InvalidArgument, "P_t must be finite and >= 0");
}

// Discriminant shared by S_c and its derivative; guarded against tiny
// negative rounding.
double discriminant(double c, double z)
{
    const double t = z + c - 1.0;
    double d = t * t + 4.0 * z;
    if (d < 0.0 && d > -1e-12) d = 0.0;
    return d;
}

}  // namespace

RateInputs RateInputs::from_streams(int G, int Q, int L, double p_t)
{
    return {G, static_cast<double>(Q) / L, L, p_t};
}

RateInputs RateInputs::from_ratio(int G, double c, int L, double p_t)
{
    return {G, c, L, p_t};
}

double mf_rate(const RateInputs& in)
{
    check_inputs(in);
    return in.c * in.G * in.L * std::log1p(in.omega() / in.c);
}

double mf_cacheless(double c_prime, int L, double p_t)
{
    return mf_rate(RateInputs::from_ratio(1, c_prime, L, p_t));
}

double zf_rate(const RateInputs& in)
{
    check_inputs(in);
    if (in.c >= 1.0) fail(ErrorCode::COutOfRange, fmt::format("ZF needs c < 1, got {}", in.c));
    return in.c * in.L * in.G * std::log1p(in.p_t / in.G * (1.0 / in.c - 1.0));
}

double stieltjes(double c, double z)
{
    if (!(z > 0.0)) fail(ErrorCode::DomainError, "stieltjes needs z > 0");
    if (c < 0.0) fail(ErrorCode::DomainError, "stieltjes needs c >= 0");
    // Positive root of z S^2 + (z + c - 1) S - 1 = 0, written so that no
    // subtraction of nearly equal terms occurs on either branch.
    const double t = z + c - 1.0;
    const double r = std::sqrt(discriminant(c, z));
    return t > 0.0 ? 2.0 / (t + r) : (r - t) / (2.0 * z);
}

double stieltjes_deriv(double c, double z)
{
    const double s = stieltjes(c, z);
    // Implicit derivative of the quadratic: S' (2 z S + z + c - 1) = -S (S + 1),
    // and 2 z S + z + c - 1 is the square root of the discriminant.
    return -s * (s + 1.0) / std::sqrt(discriminant(c, z));
}

RzfDeterministics rzf_deterministics(double c, double p_t)
{
    if (!(c > 0.0)) fail(ErrorCode::DomainError, "rzf_deterministics needs c > 0");
    if (!(p_t > 0.0) || !std::isfinite(p_t)) fail(ErrorCode::DomainError, "rzf_deterministics needs P_t > 0");
    const double z = 1.0 / p_t;
    RzfDeterministics d;
    d.s = stieltjes(c, z);
    d.a = d.s;
    d.ds = stieltjes_deriv(c, z);
    d.b = d.a + d.ds / p_t;
    if (!(d.b > 0.0)) fail(ErrorCode::NonPositiveB, fmt::format("b={} at c={} P_t={}", d.b, c, p_t));
    d.p_sq = p_t / d.b;
    d.beyond_theory = c > 1.0;
    return d;
}

double rzf_power_closed_form(double c, double p_t)
{
    const double root = std::sqrt((1.0 - c) * (1.0 - c) * p_t * p_t + 2.0 * (1.0 + c) * p_t + 1.0);
    const double a = 0.5 * (root + (1.0 - c) * p_t - 1.0);
    const double correction = 0.5 * p_t * ((p_t * (c - 1.0) * (c - 1.0) + c + 1.0) / root + 1.0 - c);
    return p_t / (a - correction);
}

double rzf_sinr(const RateInputs& in)
{
    check_inputs(in);
    if (in.p_t == 0.0) return 0.0;
    const auto d = rzf_deterministics(in.c, in.p_t);
    return (d.a * d.a * d.p_sq / in.G) / ((1.0 + d.a) * (1.0 + d.a) + in.p_t / in.G);
}

double rzf_rate(const RateInputs& in)
{
    return in.c * in.G * in.L * std::log1p(rzf_sinr(in));
}

double raw_rate(Precoder p, const RateInputs& in)
{
    switch (p) {
    case Precoder::MF: return mf_rate(in);
    case Precoder::ZF: return zf_rate(in);
    case Precoder::RZF: return rzf_rate(in);
    }
    fail(ErrorCode::InvalidArgument, "unknown precoder");
}

double CsiCostModel::zeta(int G, int L) const
{
    if (!(t_c * w_c > 0.0)) fail(ErrorCode::InvalidArgument, "T_c * W_c must be positive");
    if (beta_tot < 0.0) fail(ErrorCode::InvalidArgument, "beta_tot must be >= 0");
    return beta_tot * G * L / (t_c * w_c);
}

double csi_zeta(const CsiCostModel& model, int G, int L)
{
    return model.zeta(G, L);
}

std::string_view to_string(RateSource s)
{
    return s == RateSource::ClosedForm ? "closed_form" : "monte_carlo";
}

RateReport effective_rate_with_zeta(Precoder p, const RateInputs& in, double zeta)
{
    if (!(zeta >= 0.0)) fail(ErrorCode::InvalidArgument, "zeta must be >= 0");
    const double overhead = in.c * zeta;
    if (overhead > 1.0)
        fail(ErrorCode::CsiOverheadExceedsBlock,
             fmt::format("c*zeta = {} exceeds the coherence block", overhead));
    RateReport r;
    r.precoder = p;
    r.G = in.G;
    r.Q = in.streams();
    r.L = in.L;
    r.snr_db = 10.0 * std::log10(in.p_t);
    r.c = in.c;
    r.zeta = zeta;
    r.avg_sum_rate_nats = raw_rate(p, in);
    r.effective_rate_nats = (1.0 - overhead) * r.avg_sum_rate_nats;
    return r;
}

RateReport effective_rate(Precoder p, const RateInputs& in, const CsiCostModel& model)
{
    return effective_rate_with_zeta(p, in, model.zeta(in.G, in.L));
}

double effective_gain(Precoder p, int G, int Q, int Q_prime, int L, double p_t,
                      const CsiCostModel& model)
{
    if (G < 1 || Q < 1 || Q_prime < 1 || L < 1)
        fail(ErrorCode::InvalidArgument, "effective_gain needs positive G, Q, Q', L");
    const double xi_num = L - Q * model.zeta(G, L);
    const double xi_den = L - Q_prime * model.zeta(1, L);
    if (xi_num < 0.0)
        fail(ErrorCode::CsiOverheadExceedsBlock, "cache-aided CSI overhead exceeds the block");
    if (!(xi_den > 0.0)) fail(ErrorCode::ZeroDenominator, "cacheless effective rate is zero");
    const double xi = xi_num / xi_den;
    const double lq = static_cast<double>(L) / Q;
    const double lqp = static_cast<double>(L) / Q_prime;

    double num = 0.0;
    double den = 0.0;
    switch (p) {
    case Precoder::MF:
        num = std::log1p(lq * (p_t / (p_t + G)));
        den = std::log1p(lqp * (p_t / (p_t + 1)));
        break;
    case Precoder::ZF:
        if (Q >= L || Q_prime >= L) fail(ErrorCode::COutOfRange, "ZF gain needs Q, Q' < L");
        num = std::log1p(p_t / G * (lq - 1.0));
        den = std::log1p(p_t * (lqp - 1.0));
        break;
    case Precoder::RZF:
        num = rzf_rate(RateInputs::from_streams(G, Q, L, p_t)) / (static_cast<double>(G) * Q);
        den = rzf_rate(RateInputs::from_streams(1, Q_prime, L, p_t)) / Q_prime;
        break;
    }
    if (!(den > 0.0)) fail(ErrorCode::ZeroDenominator, "cacheless rate is zero");
    return xi * (static_cast<double>(G) * Q / Q_prime) * (num / den);
}

}  // namespace ccdl
