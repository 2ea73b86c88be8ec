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
#include "ccdl/optimizer.hpp"

#include "../oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace ccdl;

namespace {

const CsiCostModel kModel{10.0, 0.04, 300e3};

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

double mf_grid(int G, double p, double zeta)
{
    return oracle::grid_argmax([&](double c) { return (1 - c * zeta) * oracle::mf_rate(G, c, 64, p); }, 1e-3,
                               1.0 / zeta);
}

double zf_grid(int G, double p, double zeta)
{
    return oracle::grid_argmax([&](double c) { return (1 - c * zeta) * oracle::zf_rate(G, c, 64, p); }, 1e-3,
                               std::min(1.0, 1.0 / zeta));
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("Lambert W")
{
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(lambert_w0(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lambert_w0(73.576) == doctest::Approx(3.1507).epsilon(1e-4));
    CHECK(lambert_w0(-1.0 / std::numbers::e) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(lambert_w0(-0.2) == doctest::Approx(-0.2591711018190737).epsilon(1e-13));
    CHECK(code_of([] { lambert_w0(-0.4); }) == ErrorCode::DomainError);
    for (double e10 = -6.0; e10 <= 6.0; e10 += 0.05) {
        const double x = std::pow(10.0, e10);
        const double w = lambert_w0(x);
        CHECK(std::abs(w * std::exp(w) - x) < 1e-12 * std::max(1.0, x));
    }
    for (double x = -0.36; x < 0.0; x += 0.01) {
        const double w = lambert_w0(x);
        CHECK(w >= -1.0);
        CHECK(std::abs(w * std::exp(w) - x) < 1e-12);
    }
}

TEST_CASE("MF optimum")
{
    const auto a = mf_opt_c(6, 100.0, 0.16);
    CHECK(a.c_star == doctest::Approx(1.20972).epsilon(1e-5));
    CHECK(a.residual < 1e-10);
    CHECK(a.method == OptMethod::RootBisection);
    CHECK(std::abs(a.c_star - mf_grid(6, 100.0, 0.16)) <= 1e-3);

    const auto b = mf_opt_c(1, 100.0, 0.16 / 6);
    CHECK(b.c_star == doctest::Approx(3.7044).epsilon(1e-4));
    CHECK(std::abs(b.c_star - mf_grid(1, 100.0, 0.16 / 6)) <= 1e-3);
    CHECK(code_of([] { mf_opt_c(6, 100.0, 0.0); }) == ErrorCode::UnboundedObjective);
}

TEST_CASE("ZF optimum")
{
    const auto a = zf_opt_c(6, 100.0, 0.16);
    CHECK(a.c_star == doctest::Approx(0.59267).epsilon(1e-5));
    CHECK(a.residual < 1e-10);
    CHECK(a.c_star < a.c_star_r);
    CHECK(a.c_star_r < 1.0);
    CHECK(std::abs(zf_stationarity(a.c_star_r, 6, 100.0, 0.0)) < 1e-10);
    CHECK(std::abs(a.c_star - zf_grid(6, 100.0, 0.16)) <= 1e-3);

    const auto b = zf_opt_c(1, 100.0, 0.16 / 6);
    CHECK(b.c_star == doctest::Approx(0.72767).epsilon(1e-5));
    CHECK(std::abs(b.c_star - zf_grid(1, 100.0, 0.16 / 6)) <= 1e-3);

    CHECK(zf_opt_c(5, 1e8, 0.0).c_star > 0.9);
    CHECK(zf_opt_c(5, 1e8, 0.0).c_star < 1.0);
}

TEST_CASE("optimizer matches the brute-force grid over a range of inputs")
{
    for (int G : {1, 2, 6})
        for (double db : {0.0, 10.0, 20.0, 30.0}) {
            const double p = db_to_linear(db);
            const double zeta = kModel.zeta(G, 64);
            const auto mf = mf_opt_c(G, p, zeta);
            CHECK(mf.residual < 1e-10);
            CHECK(std::abs(mf.c_star - mf_grid(G, p, zeta)) <= 1e-3);
            const auto zf = zf_opt_c(G, p, zeta);
            CHECK(zf.residual < 1e-10);
            CHECK(std::abs(zf.c_star - zf_grid(G, p, zeta)) <= 1e-3);
            CHECK(zf.c_star < zf.c_star_r);
        }
}

TEST_CASE("high-SNR closed form")
{
    const auto a = zf_opt_c_high_snr(5, 1000.0);
    CHECK(a.c_star == doctest::Approx(0.75908).epsilon(1e-5));
    CHECK_FALSE(a.low_snr);
    CHECK(std::abs(a.c_star - zf_opt_c(5, 1000.0, 0.0).c_star) < 0.02);
    CHECK(zf_opt_c_high_snr(5, 1e12).c_star > 0.95);
    const auto low = zf_opt_c_high_snr(5, 10.0);
    CHECK(low.low_snr);
    CHECK(low.c_star > 0.0);
    CHECK(low.c_star < 1.0);
}

TEST_CASE("RZF optimum against a fine grid")
{
    const double p = 10.0;
    const auto r = rzf_opt_c(5, 64, p, kModel);
    CHECK(r.method == OptMethod::GridSearch);
    const double zeta = kModel.zeta(5, 64);
    const double fine = oracle::grid_argmax(
        [&](double c) { return (1 - c * zeta) * oracle::rzf_rate(5, c, 64, p); }, 1e-5, 1.0);
    CHECK(std::abs(r.c_star - fine) <= 1e-3);
}

TEST_CASE("RZF optimum respects a binding CSI budget")
{
    const CsiCostModel heavy{240.0, 0.04, 300e3};  // zeta = 1.6 at G=5, L=16
    const double zeta = heavy.zeta(5, 16);
    REQUIRE(1.0 / zeta < 1.0);
    const auto r = rzf_opt_c(5, 16, 100.0, heavy);
    CHECK(r.c_star < 1.0 / zeta);
    CHECK((1 - r.c_star * zeta) * rzf_rate(RateInputs::from_ratio(5, r.c_star, 16, 100.0)) > 0.0);
}

TEST_CASE("RZF optimum approaches ZF at high SNR")
{
    const double p = 1e4;
    CHECK(std::abs(rzf_opt_c(5, 64, p, kModel).c_star - zf_opt_c(5, p, kModel.zeta(5, 64)).c_star) < 0.02);
}

TEST_CASE("integer stream rule")
{
    const double zeta = kModel.zeta(6, 32);
    auto zf = [&](int q) {
        return effective_rate_with_zeta(Precoder::ZF, RateInputs::from_streams(6, q, 32, 100.0), zeta).effective_rate_nats;
    };
    const auto a = integer_q(0.59, 32, zf, {1, 31});
    CHECK((a.q_star == 18 || a.q_star == 19));
    CHECK(a.rate == std::max(zf(18), zf(19)));

    int calls = 0;
    const auto b = integer_q(0.5, 32, [&](int q) { ++calls; return -std::abs(q - 16.2); }, {1, 31});
    CHECK(calls == 2);
    CHECK(b.q_star == 16);

    const auto c = integer_q(1.21, 32, [](int q) { return double(q); }, {1, 32});
    CHECK(c.q_star == 32);

    const auto tie = integer_q(0.25, 16, [](int) { return 1.0; }, {1, 16});
    CHECK(tie.q_star == 4);

    CHECK(code_of([] { integer_q(0.5, 8, [](int) { return 0.0; }, {1, 0}); }) == ErrorCode::EmptyFeasibleSet);
}

TEST_CASE("optimized gains in the published setting")
{
    const double p = db_to_linear(20.0);
    const auto zf = optimized_gain(Precoder::ZF, 6, 32, p, kModel);
    CHECK(zf.gain == doctest::Approx(3.1189).epsilon(1e-4));
    CHECK(zf.cached.q_star == 19);
    CHECK(zf.cacheless.q_star == 23);
    CHECK(zf.cached.b_unconstrained);
    const auto mf = optimized_gain(Precoder::MF, 6, 32, p, kModel);
    CHECK(mf.gain == doctest::Approx(4.2675).epsilon(1e-4));
    CHECK(mf.cached.q_star == 39);
    CHECK(mf.cacheless.q_star == 119);
    CHECK(optimized_gain(Precoder::ZF, 6, 64, p, kModel).gain == doctest::Approx(2.8590).epsilon(1e-4));
    CHECK(optimized_gain(Precoder::MF, 6, 64, p, kModel).gain == doctest::Approx(3.8529).epsilon(1e-4));
    CHECK(optimized_gain(Precoder::RZF, 6, 32, p, kModel).gain == doctest::Approx(3.1330).epsilon(1e-3));
    for (auto pc : {Precoder::MF, Precoder::ZF, Precoder::RZF})
        CHECK(optimized_gain(pc, 1, 32, p, kModel).gain == 1.0);
}

TEST_CASE("optimized gain grows with SNR and stays below G")
{
    for (auto pc : {Precoder::MF, Precoder::ZF, Precoder::RZF})
        for (int L : {32, 64}) {
            double prev = 0.0;
            for (int db = 0; db <= 25; ++db) {
                const double g = optimized_gain(pc, 6, L, db_to_linear(db), kModel).gain;
                CHECK(g >= prev);
                CHECK(g >= 1.0);
                CHECK(g <= 6.0 + 0.01);
                prev = g;
            }
        }
}

}  // TEST_SUITE

TEST_SUITE("gain_bound") {
TEST_CASE("optimized gains at 25 dB are within 25% of G")
{
    for (auto pc : {Precoder::MF, Precoder::ZF})
        for (int L : {32, 64}) {
            const double g = optimized_gain(pc, 6, L, db_to_linear(25.0), kModel).gain;
            INFO(to_string(pc), " L=", L, " gain=", g);
            CHECK(g >= 0.75 * 6);
        }
}
}

TEST_SUITE("optimizer") {

TEST_CASE("user count caps the stream count")
{
    const auto g = optimized_gain(Precoder::MF, 6, 32, 100.0, kModel, 10);
    CHECK(g.cached.q_star <= 10);
    CHECK(g.cacheless.q_star <= 10);
    CHECK_FALSE(g.cached.b_unconstrained);
}

TEST_CASE("ZF effective rate is concave below the CSI-free optimum")
{
    const double p = 100.0;
    const int G = 6, L = 32;
    const double zeta = kModel.zeta(G, L);
    const double c_r = zf_opt_c(G, p, zeta).c_star_r;
    auto eff = [&](double c) { return (1 - c * zeta) * zf_rate(RateInputs::from_ratio(G, c, L, p)); };
    const double h = 1e-3;
    for (double c = 0.005; c + h < c_r; c += 0.005) CHECK(eff(c + h) - 2 * eff(c) + eff(c - h) < 0.0);
}

}
