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

#include "ccdl/optimizer.hpp"

#include "ccdl/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ccdl {

namespace {

constexpr double kGridStep = 1e-3;

// First sign change of f on a log-spaced grid over (lo, hi], then bisection.
double bracket_and_bisect(const std::function<double(double)>& f, double lo, double hi)
{
    constexpr int kScan = 400;
    const double ratio = std::pow(hi / lo, 1.0 / kScan);
    double a = lo;
    double fa = f(a);
    double b = a;
    double fb = fa;
    bool found = false;
    for (int i = 1; i <= kScan; ++i) {
        b = i == kScan ? hi : lo * std::pow(ratio, i);
        fb = f(b);
        if ((fa > 0.0) != (fb > 0.0) || fb == 0.0) {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) fail(ErrorCode::NoRootInBracket, fmt::format("no sign change on ({}, {}]", lo, hi));
    if (fb == 0.0) return b;

    for (int it = 0; it < 300; ++it) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

double rzf_effective(int G, double c, int L, double p_t, double zeta)
{
    return (1.0 - c * zeta) * rzf_rate(RateInputs::from_ratio(G, c, L, p_t));
}

}  // namespace

double lambert_w0(double x)
{
    constexpr double inv_e = 1.0 / std::numbers::e;
    if (std::isnan(x) || x < -inv_e - 1e-15)
        fail(ErrorCode::DomainError, fmt::format("lambert_w0 needs x >= -1/e, got {}", x));
    if (x == 0.0) return 0.0;
    if (x <= -inv_e) return -1.0;

    double w;
    if (x < -0.25) {
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (x < 3.0) {
        w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
    } else {
        const double l1 = std::log(x);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 50; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) return w;
        const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w)))
            return w;
    }
    fail(ErrorCode::NoConvergence, fmt::format("lambert_w0({}) did not converge", x));
}

std::string_view to_string(OptMethod m)
{
    switch (m) {
    case OptMethod::RootBisection: return "root_bisection";
    case OptMethod::GridSearch: return "grid_search";
    case OptMethod::LambertClosedForm: return "lambert_closed_form";
    }
    return "?";
}

double mf_stationarity(double c, int G, double p_t, double zeta)
{
    const double omega = p_t / (p_t + G);
    return (1.0 - 2.0 * zeta * c) * std::log1p(omega / c) - omega * (1.0 - zeta * c) / (omega + c);
}

double zf_stationarity(double c, int G, double p_t, double zeta)
{
    const double x = p_t / G;
    return (1.0 - 2.0 * zeta * c) * std::log1p(x * (1.0 / c - 1.0)) -
           (1.0 - zeta * c) * x / ((1.0 - x) * c + x);
}

OptimizationResult mf_opt_c(int G, double p_t, double zeta)
{
    if (G < 1 || !(p_t > 0.0)) fail(ErrorCode::InvalidArgument, "mf_opt_c needs G >= 1, P_t > 0");
    if (zeta < 0.0) fail(ErrorCode::InvalidArgument, "zeta must be >= 0");
    if (zeta == 0.0)
        fail(ErrorCode::UnboundedObjective, "MF effective rate keeps growing with c when CSI is free");
    auto f = [&](double c) { return mf_stationarity(c, G, p_t, zeta); };
    OptimizationResult r;
    r.method = OptMethod::RootBisection;
    r.c_star = bracket_and_bisect(f, 1e-12, 0.5 / zeta);
    r.residual = std::abs(f(r.c_star));
    return r;
}

OptimizationResult zf_opt_c(int G, double p_t, double zeta)
{
    if (G < 1 || !(p_t > 0.0)) fail(ErrorCode::InvalidArgument, "zf_opt_c needs G >= 1, P_t > 0");
    if (zeta < 0.0) fail(ErrorCode::InvalidArgument, "zeta must be >= 0");
    OptimizationResult r;
    r.method = OptMethod::RootBisection;
    r.c_star_r = bracket_and_bisect([&](double c) { return zf_stationarity(c, G, p_t, 0.0); }, 1e-12,
                                    1.0);
    auto f = [&](double c) { return zf_stationarity(c, G, p_t, zeta); };
    const double hi = zeta > 0.0 ? std::min(1.0, 0.5 / zeta) : 1.0;
    r.c_star = bracket_and_bisect(f, 1e-12, hi);
    r.residual = std::abs(f(r.c_star));
    return r;
}

HighSnrStreams zf_opt_c_high_snr(int G, double p_t)
{
    if (G < 1 || !(p_t > 0.0)) fail(ErrorCode::InvalidArgument, "zf_opt_c_high_snr needs G >= 1, P_t > 0");
    HighSnrStreams out;
    out.c_star = 1.0 / (1.0 + 1.0 / lambert_w0(p_t / (std::numbers::e * G)));
    out.low_snr = p_t < 10.0 * G;
    return out;
}

OptimizationResult rzf_opt_c(int G, int L, double p_t, const CsiCostModel& model)
{
    if (G < 1 || L < 1 || !(p_t > 0.0)) fail(ErrorCode::InvalidArgument, "rzf_opt_c needs positive inputs");
    const double zeta = model.zeta(G, L);
    const double c_max = zeta > 1.0 ? 1.0 / zeta : 1.0;
    auto obj = [&](double c) { return rzf_effective(G, c, L, p_t, zeta); };

    double best_c = kGridStep;
    double best = obj(best_c);
    for (int k = 2; k * kGridStep < c_max; ++k) {
        const double c = k * kGridStep;
        const double v = obj(c);
        if (v > best) {
            best = v;
            best_c = c;
        }
    }

    // Golden section on the two grid cells around the best grid point.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::max(best_c - kGridStep, 0.5 * kGridStep);
    double b = std::min(best_c + kGridStep, c_max - 1e-12);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = obj(x1);
    double f2 = obj(x2);
    while (b - a > 1e-6) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = obj(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = obj(x2);
        }
    }
    const double refined = 0.5 * (a + b);

    OptimizationResult r;
    r.method = OptMethod::GridSearch;
    r.c_star = obj(refined) >= best ? refined : best_c;
    const double h = 1e-6;
    r.residual = std::abs(obj(r.c_star + h) - obj(r.c_star - h)) / (2.0 * h * L * G);
    return r;
}

Feasibility stream_feasibility(Precoder p, int L, double zeta, std::optional<int> B)
{
    Feasibility f;
    f.q_max = std::numeric_limits<int>::max();
    if (B) f.q_max = std::min(f.q_max, *B);
    if (p == Precoder::ZF) f.q_max = std::min(f.q_max, L - 1);
    if (p == Precoder::RZF) f.q_max = std::min(f.q_max, L);
    if (zeta > 0.0) {
        const double cap = std::floor(L / zeta * (1.0 + 1e-12));
        if (cap < f.q_max) f.q_max = static_cast<int>(cap);
    }
    return f;
}

IntegerChoice integer_q(double c_star, int L, const std::function<double(int)>& rate_fn,
                        const Feasibility& feasible)
{
    if (!(c_star > 0.0)) fail(ErrorCode::InvalidArgument, "integer_q needs c* > 0");
    if (feasible.q_max < feasible.q_min || feasible.q_max < 1)
        fail(ErrorCode::EmptyFeasibleSet, "no feasible stream count");
    const double base = std::floor(c_star * L);
    IntegerChoice best;
    bool have = false;
    for (double cand : {base, base + 1.0}) {
        const int q = static_cast<int>(std::clamp(cand, static_cast<double>(feasible.q_min),
                                                  static_cast<double>(feasible.q_max)));
        if (have && q == best.q_star) continue;
        const double rate = rate_fn(q);
        if (!have || rate > best.rate) {
            best = {q, rate};
            have = true;
        }
    }
    return best;
}

OptimizationResult optimize_streams(Precoder p, int G, int L, double p_t, const CsiCostModel& model,
                                    std::optional<int> B)
{
    const double zeta = model.zeta(G, L);
    OptimizationResult r;
    switch (p) {
    case Precoder::MF: r = mf_opt_c(G, p_t, zeta); break;
    case Precoder::ZF: r = zf_opt_c(G, p_t, zeta); break;
    case Precoder::RZF: r = rzf_opt_c(G, L, p_t, model); break;
    }
    const auto rate_at = [&](int q) {
        return effective_rate_with_zeta(p, RateInputs::from_streams(G, q, L, p_t), zeta).effective_rate_nats;
    };
    const auto choice = integer_q(r.c_star, L, rate_at, stream_feasibility(p, L, zeta, B));
    r.q_star = choice.q_star;
    r.effective_rate_at_q_star = choice.rate;
    r.b_unconstrained = !B.has_value();
    return r;
}

GainReport optimized_gain(Precoder p, int G, int L, double p_t, const CsiCostModel& model,
                          std::optional<int> B)
{
    GainReport g;
    g.precoder = p;
    g.G = G;
    g.L = L;
    g.p_t = p_t;
    g.zeta_cached = model.zeta(G, L);
    g.zeta_cacheless = model.zeta(1, L);
    g.cached = optimize_streams(p, G, L, p_t, model, B);
    g.cacheless = optimize_streams(p, 1, L, p_t, model, B);
    if (!(g.cacheless.effective_rate_at_q_star > 0.0))
        fail(ErrorCode::ZeroDenominator, "cacheless optimum has zero rate");
    g.gain = g.cached.effective_rate_at_q_star / g.cacheless.effective_rate_at_q_star;
    return g;
}

}  // namespace ccdl
