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

#include "ccdl/scheme.hpp"

#include "ccdl/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>

namespace ccdl {

std::string_view to_string(Precoder p)
{
    switch (p) {
    case Precoder::MF: return "mf";
    case Precoder::ZF: return "zf";
    case Precoder::RZF: return "rzf";
    }
    return "?";
}

std::optional<Precoder> parse_precoder(std::string_view name)
{
    if (name == "mf" || name == "MF") return Precoder::MF;
    if (name == "zf" || name == "ZF") return Precoder::ZF;
    if (name == "rzf" || name == "RZF") return Precoder::RZF;
    return std::nullopt;
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

Rational Rational::make(std::int64_t num, std::int64_t den)
{
    if (den == 0) fail(ErrorCode::InvalidArgument, "rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    return g > 1 ? Rational{num / g, den / g} : Rational{num, den};
}

Rational snap_gamma(double gamma, int max_den)
{
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma >= 1.0)
        fail(ErrorCode::GammaOutOfRange, fmt::format("gamma={} outside [0,1)", gamma));
    for (int den = 1; den <= std::max(max_den, 1); ++den) {
        const double num = std::round(gamma * den);
        if (std::abs(gamma - num / den) <= 1e-9)
            return Rational::make(static_cast<std::int64_t>(num), den);
    }
    fail(ErrorCode::NonIntegerLambdaGamma,
         fmt::format("gamma={} is not k/d for any d <= {}", gamma, max_den));
}

Rational parse_gamma(const std::string& text, int max_den)
{
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return snap_gamma(std::stod(text), max_den);
        return Rational::make(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
        fail(ErrorCode::InvalidArgument, fmt::format("cannot parse gamma '{}'", text));
    }
}

std::optional<std::uint64_t> binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    // Multiplicative form; every partial product is itself a binomial, so
    // the division is exact.
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (acc > UINT64_MAX) return std::nullopt;
    }
    return static_cast<std::uint64_t>(acc);
}

void for_each_subset(int n, int k, const std::function<void(const GroupSet&)>& fn)
{
    if (k < 0 || k > n) return;
    GroupSet s(static_cast<std::size_t>(k));
    std::iota(s.begin(), s.end(), 1);
    while (true) {
        fn(s);
        int i = k - 1;
        while (i >= 0 && s[i] == n - k + i + 1) --i;
        if (i < 0) return;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
}

std::vector<int> group_members(int group, int lambda_states, int B)
{
    std::vector<int> users(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) users[b] = b * lambda_states + group;
    return users;
}

ValidatedScheme validate(const SchemeConfig& config)
{
    if (config.L < 1) fail(ErrorCode::InvalidArgument, "L must be positive");
    if (config.lambda_states < 1) fail(ErrorCode::InvalidArgument, "lambda must be positive");
    if (config.K < 1) fail(ErrorCode::InvalidArgument, "K must be positive");
    if (config.Q < 1) fail(ErrorCode::InvalidArgument, "Q must be positive");
    if (!std::isfinite(config.snr_db)) fail(ErrorCode::InvalidArgument, "snr_db must be finite");

    const Rational gamma = Rational::make(config.gamma.num, config.gamma.den);
    if (gamma.num < 0 || gamma.num >= gamma.den)
        fail(ErrorCode::GammaOutOfRange,
             fmt::format("gamma={}/{} outside [0,1)", gamma.num, gamma.den));

    const std::int64_t lg_num = static_cast<std::int64_t>(config.lambda_states) * gamma.num;
    if (lg_num % gamma.den != 0)
        fail(ErrorCode::NonIntegerLambdaGamma,
             fmt::format("Lambda*gamma = {}*{}/{} is not an integer", config.lambda_states,
                         gamma.num, gamma.den));
    const int cached = static_cast<int>(lg_num / gamma.den);

    if (config.K % config.lambda_states != 0)
        fail(ErrorCode::KNotMultipleOfLambda,
             fmt::format("K={} is not a multiple of Lambda={}", config.K, config.lambda_states));

    ValidatedScheme out;
    out.config = config;
    out.config.gamma = gamma;
    out.G = cached + 1;
    out.B = config.K / config.lambda_states;

    if (config.Q > out.B)
        fail(ErrorCode::QExceedsGroupSize,
             fmt::format("Q={} exceeds users per group B={}", config.Q, out.B));
    if (config.precoder != Precoder::MF && config.Q > config.L)
        fail(ErrorCode::QExceedsAntennas,
             fmt::format("Q={} exceeds L={} for {}", config.Q, config.L, to_string(config.precoder)));

    const auto sub = binomial(config.lambda_states, cached);
    if (!sub) fail(ErrorCode::InvalidArgument, "subpacketization exceeds 64 bits");
    out.subpacketization = *sub;
    out.c = static_cast<double>(config.Q) / config.L;
    out.p_t = db_to_linear(config.snr_db);
    return out;
}

ValidatedScheme minimal_scheme(int G, int Q, int L, double snr_db, Precoder precoder)
{
    if (G < 1) fail(ErrorCode::InvalidArgument, "G must be positive");
    if (Q < 1) fail(ErrorCode::InvalidArgument, "Q must be positive");
    SchemeConfig cfg;
    cfg.L = L;
    cfg.snr_db = snr_db;
    cfg.lambda_states = G;
    cfg.gamma = Rational::make(G - 1, G);
    cfg.K = G * Q;
    cfg.Q = Q;
    cfg.precoder = precoder;
    return validate(cfg);
}

DeliveryPlan build_delivery_plan(const ValidatedScheme& scheme)
{
    const int lambda = scheme.config.lambda_states;
    const int q = scheme.config.Q;

    DeliveryPlan plan;
    plan.rounds = (scheme.B + q - 1) / q;
    plan.stages_per_round = binomial(lambda, scheme.G).value_or(0);

    std::vector<GroupSet> psis;
    for_each_subset(lambda, scheme.G, [&](const GroupSet& s) { psis.push_back(s); });

    plan.stages.reserve(psis.size() * static_cast<std::size_t>(plan.rounds));
    for (int r = 0; r < plan.rounds; ++r) {
        const int first = r * q;
        const int last = std::min(first + q, scheme.B);
        for (const GroupSet& psi : psis) {
            Stage stage;
            stage.round = r;
            stage.groups = psi;
            for (int g : psi) {
                GroupDelivery d;
                d.group = g;
                for (int other : psi)
                    if (other != g) d.label.push_back(other);
                for (int b = first; b < last; ++b) d.users.push_back(b * lambda + g);
                stage.deliveries.push_back(std::move(d));
            }
            plan.stages.push_back(std::move(stage));
        }
    }
    return plan;
}

GainChoice max_gain(Rational gamma, std::uint64_t subpack_budget)
{
    gamma = Rational::make(gamma.num, gamma.den);
    if (gamma.num <= 0 || gamma.num >= gamma.den)
        fail(ErrorCode::GammaOutOfRange, "max_gain needs gamma in (0,1)");
    if (subpack_budget < 1) fail(ErrorCode::InvalidArgument, "subpacketization budget must be >= 1");

    // Valid Lambda are multiples of den; C(m*den, m*num) grows with m.
    GainChoice best;
    for (std::int64_t m = 1;; ++m) {
        const std::int64_t lambda = m * gamma.den;
        if (lambda > INT32_MAX) break;
        const auto sub = binomial(static_cast<int>(lambda), static_cast<int>(m * gamma.num));
        if (!sub || *sub > subpack_budget) break;
        best = {static_cast<int>(lambda), static_cast<int>(m * gamma.num) + 1};
    }
    if (best.G == 0)
        fail(ErrorCode::NoFeasibleLambda,
             fmt::format("no Lambda fits subpacketization budget {}", subpack_budget));
    return best;
}

}  // namespace ccdl
