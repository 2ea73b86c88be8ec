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
#include "ccdl/precoding.hpp"

#include "../oracles/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace ccdl;

namespace {

std::vector<ChannelMatrix> stage(int G, int Q, int L, std::uint64_t seed)
{
    RandomStream s(trial_stream(seed, 0));
    std::vector<ChannelMatrix> out;
    for (int g = 0; g < G; ++g) out.push_back(draw_channel(Q, L, s));
    return out;
}

double rel_err(const CMatrix& a, const CMatrix& b)
{
    return (a - b).norm() / b.norm();
}

}  // namespace

TEST_SUITE("precoding") {

TEST_CASE("precoder definitions")
{
    const auto h = draw_channel(4, 16, RngSeed{3, 1});
    const CMatrix mf = build_precoder(h, PrecoderKind::mf());
    CHECK((mf.array() == h.h.adjoint().array()).all());

    const CMatrix zf = build_precoder(h, PrecoderKind::zf());
    CHECK(rel_err(h.h * zf, CMatrix::Identity(4, 4)) < 1e-9);
    const CMatrix zf_ref = h.h.adjoint() * (h.h * h.h.adjoint()).inverse();
    CHECK(rel_err(zf, zf_ref) < 1e-12);

    const CMatrix rzf = build_precoder(h, PrecoderKind::rzf(2.5));
    const CMatrix rzf_ref = h.h.adjoint() * (h.h * h.h.adjoint() + 2.5 * CMatrix::Identity(4, 4)).inverse();
    CHECK(rel_err(rzf, rzf_ref) < 1e-12);
    // Push-through identity: (H^H H + alpha I)^{-1} H^H.
    const CMatrix push = (h.h.adjoint() * h.h + 2.5 * CMatrix::Identity(16, 16)).inverse() * h.h.adjoint();
    CHECK(rel_err(rzf, push) < 1e-10);
}

TEST_CASE("MF on the identity channel is the identity")
{
    ChannelMatrix h{CMatrix::Identity(5, 5)};
    CHECK((build_precoder(h, PrecoderKind::mf()).array() == CMatrix::Identity(5, 5).array()).all());
}

TEST_CASE("RZF tends to ZF as alpha vanishes")
{
    const auto h = draw_channel(4, 16, RngSeed{4, 1});
    const CMatrix zf = build_precoder(h, PrecoderKind::zf());
    const CMatrix rzf = build_precoder(h, PrecoderKind::rzf(1e-9));
    CHECK(rel_err(rzf, zf) < 1e-6);
}

TEST_CASE("ZF on every nonsingular draw inverts the channel")
{
    for (int t = 0; t < 100; ++t) {
        const int Q = 1 + t % 8;
        const auto h = draw_channel(Q, Q + t % 5, trial_stream(6, t));
        CHECK(rel_err(h.h * build_precoder(h, PrecoderKind::zf()), CMatrix::Identity(Q, Q)) < 1e-9);
    }
}

TEST_CASE("ZF on a rank-deficient channel")
{
    ChannelMatrix h{CMatrix::Zero(3, 8)};
    h.h.row(0).setOnes();
    h.h.row(1).setOnes();
    h.h(2, 4) = 1.0;
    try {
        build_precoder(h, PrecoderKind::zf());
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RankDeficient);
    }
    CHECK_THROWS_AS(build_precoder(draw_channel(5, 4, RngSeed{1, 1}), PrecoderKind::zf()), Error);
}

TEST_CASE("power factors")
{
    const PowerSpec exact{PowerMode::Exact};
    CHECK(power_factor(PrecoderKind::mf(), 16, 64, 10.0, exact) == doctest::Approx(std::sqrt(10.0 / 1024)).epsilon(1e-15));
    CHECK(power_factor(PrecoderKind::mf(), 16, 64, 10.0, exact) == doctest::Approx(0.0988212).epsilon(1e-6));
    CHECK(power_factor_sq(PrecoderKind::zf(), 16, 64, 10.0, exact) == 30.0);
    try {
        power_factor(PrecoderKind::rzf(6.4), 16, 64, 10.0, exact);
        FAIL("expected ExactUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ExactUnavailable);
    }
    CHECK(power_factor_sq(PrecoderKind::rzf(12.8), 64, 128, 10.0, {PowerMode::Asymptotic}) ==
          doctest::Approx(17.5733).epsilon(1e-5));
}

TEST_CASE("Monte Carlo power factors match their exact values")
{
    const PowerSpec mc{PowerMode::MonteCarlo, 4000, 9};
    const double mf = power_factor_sq(PrecoderKind::mf(), 16, 64, 10.0, mc);
    CHECK(std::abs(mf / (10.0 / 1024) - 1.0) < 0.01);
    const double zf = power_factor_sq(PrecoderKind::zf(), 16, 64, 10.0, mc);
    CHECK(std::abs(zf / 30.0 - 1.0) < 0.01);
}

TEST_CASE("RZF Monte Carlo power at L=128 is within 2% of p^2")
{
    const double mc = power_factor_sq(PrecoderKind::rzf(12.8), 64, 128, 10.0, {PowerMode::MonteCarlo, 1000, 3});
    CHECK(std::abs(mc / 17.5733 - 1.0) < 0.02);
}

TEST_CASE("MF power scales with P_t and V ignores it")
{
    const PowerSpec exact{PowerMode::Exact};
    CHECK(power_factor_sq(PrecoderKind::mf(), 8, 32, 70.0, exact) ==
          doctest::Approx(7.0 * power_factor_sq(PrecoderKind::mf(), 8, 32, 10.0, exact)).epsilon(1e-15));
    CHECK(power_factor_sq(PrecoderKind::zf(), 8, 32, 70.0, exact) ==
          doctest::Approx(7.0 * power_factor_sq(PrecoderKind::zf(), 8, 32, 10.0, exact)).epsilon(1e-15));
    const auto h = draw_channel(8, 32, RngSeed{2, 2});
    CHECK((build_precoder(h, PrecoderKind::for_operating_point(Precoder::ZF, 32, 10.0)).array() ==
           build_precoder(h, PrecoderKind::for_operating_point(Precoder::ZF, 32, 70.0)).array())
              .all());
}

TEST_CASE("power trace from the Gram route matches Tr V^H V")
{
    for (auto kind : {PrecoderKind::mf(), PrecoderKind::zf(), PrecoderKind::rzf(3.0)}) {
        const auto h = draw_channel(6, 20, RngSeed{8, 8});
        const CMatrix v = build_precoder(h, kind);
        const double want = (v.adjoint() * v).trace().real();
        CHECK(group_response(h, kind).power_trace == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("ZF SINRs are deterministic with exact power")
{
    const int G = 5, Q = 10, L = 20;
    const double rho_sq = power_factor_sq(PrecoderKind::zf(), Q, L, 10.0, {PowerMode::Exact});
    for (int t = 0; t < 10; ++t) {
        const auto s = stage(G, Q, L, 100 + t);
        const auto sinr = stage_sinrs(s, PrecoderKind::zf(), rho_sq);
        REQUIRE(sinr.size() == static_cast<std::size_t>(G * Q));
        for (double x : sinr) CHECK(x == doctest::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("fast and direct SINR routes agree")
{
    for (auto kind : {PrecoderKind::mf(), PrecoderKind::zf(), PrecoderKind::rzf(0.7)}) {
        const auto s = stage(3, 5, 12, 7);
        const auto fast = stage_sinrs(s, kind, 4.0);
        const auto direct = stage_sinrs_direct(s, kind, 4.0);
        REQUIRE(fast.size() == direct.size());
        for (std::size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == doctest::Approx(direct[i]).epsilon(1e-10));
    }
}

TEST_CASE("single group SINR is the plain MISO SINR")
{
    const auto h = draw_channel(4, 8, RngSeed{12, 0});
    const CMatrix v = build_precoder(h, PrecoderKind::mf());
    const CMatrix g = h.h * v;
    const std::vector<ChannelMatrix> one{h};
    const auto sinr = stage_sinrs(one, PrecoderKind::mf(), 0.5);
    for (int k = 0; k < 4; ++k) {
        double interference = 0.0;
        for (int j = 0; j < 4; ++j)
            if (j != k) interference += std::norm(g(k, j));
        CHECK(sinr[k] == doctest::Approx(0.5 * std::norm(g(k, k)) / (1 + 0.5 * interference)).epsilon(1e-12));
    }
}

TEST_CASE("RZF SINR through the leave-one-out decomposition equals the direct SINR")
{
    for (int t = 0; t < 30; ++t) {
        const int Q = 2 + t % 6;
        const int L = Q + 1 + t % 9;
        const double p_t = std::pow(10.0, (t % 7) / 2.0);
        const double alpha = L / p_t;
        const double rho_sq = 0.3 + t;
        const int G = 1 + t % 4;
        const std::vector<ChannelMatrix> one{draw_channel(Q, L, trial_stream(40, t))};
        const auto direct = stage_sinrs_direct(one, PrecoderKind::rzf(alpha), rho_sq);
        const auto loo = rzf_sinrs_loo(one.front(), alpha, rho_sq * G, G);
        for (int k = 0; k < Q; ++k) CHECK(std::abs(loo[k] - direct[k]) <= 1e-8 * std::max(1.0, direct[k]));
    }
}

TEST_CASE("cancellation leaves only the intra-group signal")
{
    for (auto p : {Precoder::MF, Precoder::ZF, Precoder::RZF}) {
        const auto kind = PrecoderKind::for_operating_point(p, 16, 10.0);
        for (int seed = 0; seed < 100; ++seed) {
            const auto s = stage(2, 4, 16, 500 + seed);
            CHECK(cancellation_residual(s, kind, 1.7, trial_stream(900, seed)) < 1e-9);
        }
    }
}

TEST_CASE("one group has nothing to cancel")
{
    for (auto p : {Precoder::MF, Precoder::ZF, Precoder::RZF}) {
        const auto s = stage(1, 4, 16, 3);
        CHECK(cancellation_residual(s, PrecoderKind::for_operating_point(p, 16, 10.0), 2.0, {1, 1}) == 0.0);
    }
}

TEST_CASE("MF per-user rate at L=64 follows the finite-L moment value")
{
    // The infinite-L closed form sits 2.9% below the simulated value at this size;
    // the second-moment expression captures the finite-L correction.
    const int G = 5, Q = 16, L = 64, trials = 2000;
    const double rho_sq = power_factor_sq(PrecoderKind::mf(), Q, L, 10.0, {PowerMode::Exact});
    double acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        const auto sinr = stage_sinrs(stage(G, Q, L, 7000 + t), PrecoderKind::mf(), rho_sq);
        for (double x : sinr) acc += std::log1p(x);
    }
    const double per_user = acc / trials / (G * Q);
    CHECK(std::abs(per_user / (oracle::mf_rate_moments(G, Q, L, 10.0) / (G * Q)) - 1.0) < 0.01);
    CHECK(per_user > 103.94 / 80);
}

}
