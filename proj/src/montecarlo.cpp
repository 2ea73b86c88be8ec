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

#include "ccdl/montecarlo.hpp"

#include "ccdl/analytic.hpp"
#include "ccdl/error.hpp"
#include "ccdl/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <optional>

namespace ccdl {

namespace {

constexpr std::uint32_t kMaxAttempts = 16;

struct TrialDraw {
    std::vector<GroupResponse> groups;
    int resampled = 0;
};

TrialDraw draw_trial(const McConfig& mc, std::size_t t)
{
    const int G = mc.scheme.G;
    const int Q = mc.scheme.config.Q;
    const int L = mc.scheme.config.L;
    TrialDraw out;
    for (std::uint32_t attempt = 0;; ++attempt) {
        try {
            RandomStream stream(trial_stream(mc.seed, t, attempt));
            out.groups.clear();
            for (int g = 0; g < G; ++g)
                out.groups.push_back(group_response(draw_channel(Q, L, stream), mc.precoder));
            return out;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RankDeficient || attempt + 1 >= kMaxAttempts) throw;
            ++out.resampled;
        }
    }
}

double trial_sum_rate(const std::vector<GroupResponse>& groups, double rho_sq, int G)
{
    std::vector<double> sinrs;
    for (const auto& r : groups) append_sinrs(r, rho_sq, G, sinrs);
    CompensatedSum acc;
    for (double s : sinrs) acc.add(std::log1p(s));
    return acc.value();
}

void summarize(std::span<const double> values, McEstimate& est)
{
    const auto n = static_cast<double>(values.size());
    est.trials = static_cast<int>(values.size());
    est.mean = compensated_sum(values) / n;
    CompensatedSum ss;
    for (double v : values) ss.add((v - est.mean) * (v - est.mean));
    est.std_error = values.size() > 1 ? std::sqrt(ss.value() / (n - 1.0) / n) : 0.0;
}

}  // namespace

McConfig McConfig::make(const ValidatedScheme& scheme, int trials, std::uint64_t seed)
{
    McConfig mc;
    mc.trials = trials;
    mc.seed = seed;
    mc.scheme = scheme;
    mc.precoder = PrecoderKind::for_operating_point(scheme.config.precoder, scheme.config.L, scheme.p_t);
    mc.power.mode = default_power_mode(scheme.config.precoder);
    return mc;
}

McEstimate estimate_sum_rate(const McConfig& mc)
{
    if (mc.trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");
    const int G = mc.scheme.G;
    const int Q = mc.scheme.config.Q;
    const int L = mc.scheme.config.L;
    const auto n = static_cast<std::size_t>(mc.trials);

    McEstimate est;
    if (mc.trials < 100)
        est.warnings.push_back(fmt::format("{} trials is below the 100 needed for a usable estimate", mc.trials));

    const bool same_set = mc.power.mode == PowerMode::MonteCarlo && mc.power.trials == 0;
    std::optional<double> rho_sq;
    if (!same_set) rho_sq = power_factor_sq(mc.precoder, Q, L, mc.scheme.p_t, mc.power);

    std::vector<double> values(n);
    std::vector<double> traces(same_set ? n : 0);
    std::vector<std::vector<GroupResponse>> stored(same_set ? n : 0);
    std::vector<int> resampled(n, 0);

    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            TrialDraw d = draw_trial(mc, t);
            resampled[t] = d.resampled;
            if (same_set) {
                CompensatedSum tr;
                for (const auto& g : d.groups) tr.add(g.power_trace);
                traces[t] = tr.value() / G;
                stored[t] = std::move(d.groups);
            } else {
                values[t] = trial_sum_rate(d.groups, *rho_sq, G);
            }
        }
    });

    for (int r : resampled) est.resampled += r;
    if (est.resampled > 0 && static_cast<double>(est.resampled) > 1e-3 * mc.trials)
        fail(ErrorCode::RankDeficient,
             fmt::format("{} singular draws in {} trials exceeds 0.1%", est.resampled, mc.trials));

    if (same_set) {
        rho_sq = mc.scheme.p_t / (compensated_sum(traces) / mc.trials);
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) values[t] = trial_sum_rate(stored[t], *rho_sq, G);
        });
    }

    est.rho_sq = *rho_sq;
    summarize(values, est);
    return est;
}

std::vector<ConvergenceRow> convergence_report(Precoder p, double c, int G, double snr_db,
                                               const std::vector<int>& Ls, int trials,
                                               std::uint64_t seed)
{
    std::vector<ConvergenceRow> rows;
    for (int L : Ls) {
        const double q_real = c * L;
        const auto Q = static_cast<int>(std::lround(q_real));
        if (Q < 1 || std::abs(q_real - Q) > 1e-9)
            fail(ErrorCode::InvalidArgument, fmt::format("c*L = {} is not a positive integer", q_real));
        const auto scheme = minimal_scheme(G, Q, L, snr_db, p);
        const auto est = estimate_sum_rate(McConfig::make(scheme, trials, seed));
        ConvergenceRow row;
        row.L = L;
        row.Q = Q;
        row.empirical = est.mean;
        row.std_error = est.std_error;
        row.analytic = raw_rate(p, RateInputs::from_streams(G, Q, L, scheme.p_t));
        row.rel_gap = std::abs(row.empirical - row.analytic) / row.analytic;
        rows.push_back(row);
    }
    return rows;
}

DeterministicCheck deterministic_equivalent_check(double c, double p_t, int L, int trials,
                                                  std::uint64_t seed)
{
    if (L < 1 || trials < 1 || !(c > 0.0) || !(p_t > 0.0))
        fail(ErrorCode::InvalidArgument, "deterministic_equivalent_check needs positive inputs");
    const int Q = std::max(1, static_cast<int>(std::lround(c * L)));
    const double alpha = L / p_t;

    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(values.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const auto h = draw_channel(Q, L, trial_stream(seed, t));
            const CMatrix rest = without_row(h.h, 0);
            CMatrix reg = rest.adjoint() * rest;
            reg.diagonal().array() += alpha;
            const CVector hk = h.h.row(0).adjoint();
            const CVector x = reg.llt().solve(hk);
            values[t] = hk.dot(x).real();
        }
    });

    DeterministicCheck out;
    McEstimate est;
    summarize(values, est);
    out.a_emp = est.mean;
    out.std_error = est.std_error;
    out.a_theory = stieltjes(static_cast<double>(Q) / L, 1.0 / p_t);
    out.gap = std::abs(out.a_emp - out.a_theory) / out.a_theory;
    return out;
}

}  // namespace ccdl
