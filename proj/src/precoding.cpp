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

#include "ccdl/precoding.hpp"

#include "ccdl/analytic.hpp"
#include "ccdl/error.hpp"
#include "ccdl/kernels.hpp"
#include "ccdl/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace ccdl {

namespace {

// (W + alpha I)^{-1} for the Gram matrix W of H.
CMatrix regularized_inverse(const CMatrix& gram, double alpha)
{
    CMatrix a = gram;
    a.diagonal().array() += alpha;
    Eigen::LLT<CMatrix> llt;
    if (!factor_gram(a, llt)) fail(ErrorCode::RankDeficient, "Gram matrix is numerically singular");
    return llt.solve(CMatrix::Identity(a.rows(), a.cols()));
}

void check_group(const ChannelMatrix& H, const PrecoderKind& kind)
{
    if (H.users() < 1 || H.antennas() < 1) fail(ErrorCode::InvalidArgument, "empty channel");
    if (kind.type == Precoder::RZF && !(kind.alpha > 0.0))
        fail(ErrorCode::InvalidArgument, "RZF needs alpha > 0");
    if (kind.type == Precoder::ZF && H.users() > H.antennas())
        fail(ErrorCode::RankDeficient, "ZF needs Q <= L");
}

void check_stage(std::span<const ChannelMatrix> channels)
{
    if (channels.empty()) fail(ErrorCode::InvalidArgument, "stage has no groups");
    for (const auto& h : channels)
        if (h.users() != channels.front().users() || h.antennas() != channels.front().antennas())
            fail(ErrorCode::InvalidArgument, "groups of a stage must share Q and L");
}

GroupResponse response_from_gains(const CMatrix& gains, double trace)
{
    const auto q = static_cast<std::size_t>(gains.rows());
    GroupResponse r;
    r.signal.resize(q);
    r.interference.resize(q);
    std::vector<double> scratch(q * q);
    kernels::active().signal_interference(gains.data(), q, r.signal.data(), r.interference.data(),
                                          scratch.data());
    r.power_trace = trace;
    return r;
}

}  // namespace

PrecoderKind PrecoderKind::rzf(double alpha)
{
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "RZF needs alpha > 0");
    return {Precoder::RZF, alpha};
}

PrecoderKind PrecoderKind::for_operating_point(Precoder p, int L, double p_t)
{
    switch (p) {
    case Precoder::MF: return mf();
    case Precoder::ZF: return zf();
    case Precoder::RZF:
        if (!(p_t > 0.0)) fail(ErrorCode::InvalidArgument, "RZF needs P_t > 0");
        return rzf(L / p_t);
    }
    fail(ErrorCode::InvalidArgument, "unknown precoder");
}

CMatrix build_precoder(const ChannelMatrix& H, const PrecoderKind& kind)
{
    check_group(H, kind);
    if (kind.type == Precoder::MF) return H.h.adjoint();
    const CMatrix gram = H.h * H.h.adjoint();
    return H.h.adjoint() * regularized_inverse(gram, kind.type == Precoder::RZF ? kind.alpha : 0.0);
}

PowerMode default_power_mode(Precoder p)
{
    return p == Precoder::RZF ? PowerMode::MonteCarlo : PowerMode::Exact;
}

double power_factor_sq(const PrecoderKind& kind, int Q, int L, double p_t, const PowerSpec& spec)
{
    if (Q < 1 || L < 1) fail(ErrorCode::InvalidArgument, "Q and L must be positive");
    if (!(p_t >= 0.0)) fail(ErrorCode::InvalidArgument, "P_t must be >= 0");

    if (spec.mode != PowerMode::MonteCarlo) {
        switch (kind.type) {
        case Precoder::MF: return p_t / (static_cast<double>(Q) * L);
        case Precoder::ZF:
            if (L <= Q) fail(ErrorCode::PreconditionViolated, "ZF power needs L > Q");
            return p_t * (L - Q) / Q;
        case Precoder::RZF:
            if (spec.mode == PowerMode::Exact)
                fail(ErrorCode::ExactUnavailable, "no finite-L closed form for the RZF power factor");
            return rzf_deterministics(static_cast<double>(Q) / L, p_t).p_sq;
        }
    }

    if (spec.trials < 1) fail(ErrorCode::InvalidArgument, "Monte Carlo power needs trials >= 1");
    std::vector<double> traces(static_cast<std::size_t>(spec.trials));
    parallel_for(traces.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            for (std::uint32_t attempt = 0;; ++attempt) {
                try {
                    const auto h = draw_channel(Q, L, trial_stream(spec.seed, t, attempt));
                    traces[t] = group_response(h, kind).power_trace;
                    break;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::RankDeficient || attempt >= 16) throw;
                }
            }
        }
    });
    const double mean = compensated_sum(traces) / spec.trials;
    return p_t / mean;
}

double power_factor(const PrecoderKind& kind, int Q, int L, double p_t, const PowerSpec& spec)
{
    return std::sqrt(power_factor_sq(kind, Q, L, p_t, spec));
}

GroupResponse group_response(const ChannelMatrix& H, const PrecoderKind& kind)
{
    check_group(H, kind);
    const CMatrix gram = H.h * H.h.adjoint();
    if (kind.type == Precoder::MF) {
        const auto& h = H.h;
        return response_from_gains(gram, kernels::sum_abs2({h.data(), static_cast<std::size_t>(h.size())}));
    }
    // V = H^H M, so H V = W M and Tr V^H V = Tr M W M = Tr (W M) M.
    const CMatrix m = regularized_inverse(gram, kind.type == Precoder::RZF ? kind.alpha : 0.0);
    const CMatrix gains = gram * m;
    const double trace = gains.cwiseProduct(m.transpose()).sum().real();
    return response_from_gains(gains, trace);
}

void append_sinrs(const GroupResponse& r, double rho_sq, int G, std::vector<double>& out)
{
    const std::size_t at = out.size();
    out.resize(at + r.signal.size());
    kernels::active().sinr(r.signal.data(), r.interference.data(), r.signal.size(), rho_sq / G,
                           out.data() + at);
}

std::vector<double> stage_sinrs(std::span<const ChannelMatrix> channels, const PrecoderKind& kind,
                                double rho_sq)
{
    check_stage(channels);
    const int G = static_cast<int>(channels.size());
    std::vector<double> out;
    out.reserve(channels.size() * static_cast<std::size_t>(channels.front().users()));
    for (const auto& h : channels) append_sinrs(group_response(h, kind), rho_sq, G, out);
    return out;
}

std::vector<double> stage_sinrs_direct(std::span<const ChannelMatrix> channels,
                                       const PrecoderKind& kind, double rho_sq)
{
    check_stage(channels);
    const double scale = rho_sq / static_cast<double>(channels.size());
    std::vector<double> out;
    for (const auto& h : channels) {
        const CMatrix gains = h.h * build_precoder(h, kind);
        for (int k = 0; k < gains.rows(); ++k) {
            double interference = 0.0;
            for (int j = 0; j < gains.cols(); ++j)
                if (j != k) interference += std::norm(gains(k, j));
            out.push_back(scale * std::norm(gains(k, k)) / (1.0 + scale * interference));
        }
    }
    return out;
}

std::vector<double> rzf_sinrs_loo(const ChannelMatrix& H, double alpha, double rho_sq, int G)
{
    if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "RZF needs alpha > 0");
    const int L = H.antennas();
    const double scale = rho_sq / G;
    std::vector<double> out;
    for (int k = 0; k < H.users(); ++k) {
        const CMatrix rest = without_row(H.h, k);
        const CMatrix gram_rest = rest.adjoint() * rest;
        CMatrix reg = gram_rest;
        reg.diagonal().array() += alpha;
        const CMatrix r = reg.llt().solve(CMatrix::Identity(L, L));
        const Eigen::RowVectorXcd hk = H.h.row(k);
        const double a = (hk * r * hk.adjoint())(0, 0).real();
        const double b = (hk * r * gram_rest * r * hk.adjoint())(0, 0).real();
        out.push_back(scale * a * a / ((1.0 + a) * (1.0 + a) + scale * b));
    }
    return out;
}

double cancellation_residual(std::span<const ChannelMatrix> channels, const PrecoderKind& kind,
                             double rho_sq, RngSeed symbols)
{
    check_stage(channels);
    const auto G = static_cast<int>(channels.size());
    const int Q = channels.front().users();
    const int L = channels.front().antennas();
    const double rho = std::sqrt(rho_sq);
    const double inv_sqrt_g = 1.0 / std::sqrt(static_cast<double>(G));

    RandomStream rng(symbols);
    std::vector<CMatrix> v;
    std::vector<CVector> s;
    for (const auto& h : channels) {
        v.push_back(build_precoder(h, kind));
        CVector sym(Q);
        for (int k = 0; k < Q; ++k) sym(k) = rng.complex_normal();
        s.push_back(std::move(sym));
    }

    // Per-group transmit components and their superposition.
    std::vector<CVector> x;
    CVector total = CVector::Zero(L);
    for (int g = 0; g < G; ++g) {
        x.push_back(inv_sqrt_g * (rho * (v[g] * s[g])));
        total += x.back();
    }

    std::vector<kernels::cplx> cleaned;
    std::vector<kernels::cplx> reference;
    double scale = 0.0;
    for (int psi = 0; psi < G; ++psi) {
        const CMatrix& h = channels[psi].h;
        CVector inter = CVector::Zero(Q);
        for (int phi = 0; phi < G; ++phi) {
            if (phi == psi) continue;
            const CMatrix coeff = rho * (h * v[phi]);
            inter += inv_sqrt_g * (coeff * s[phi]);
        }
        const CVector y_full = h * total;
        const CVector y_own = h * x[psi];
        for (int k = 0; k < Q; ++k) {
            const auto noise = rng.complex_normal();
            cleaned.push_back(y_full(k) + noise - inter(k));
            reference.push_back(y_own(k) + noise);
            scale = std::max(scale, std::abs(reference.back()));
        }
    }
    const double diff = kernels::max_abs_diff(cleaned, reference);
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace ccdl
