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

#include "ccdl/experiment.hpp"

#include "ccdl/error.hpp"
#include "ccdl/montecarlo.hpp"
#include "ccdl/optimizer.hpp"
#include "ccdl/parallel.hpp"
#include "ccdl/scheme.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

namespace ccdl {

namespace {

struct Resolved {
    int G = 1;
    std::optional<int> B;
    double p_t = 1.0;
    double zeta = 0.0;
    CsiCostModel model;  // reproduces zeta for the cache-aided side
};

int as_int(double v, std::string_view what)
{
    if (std::abs(v - std::round(v)) > 1e-9)
        fail(ErrorCode::ConfigError, fmt::format("{} must be an integer, got {}", what, v));
    return static_cast<int>(std::lround(v));
}

int require_q(const ExperimentSpec& s)
{
    if (!s.Q) fail(ErrorCode::ConfigError, fmt::format("{} needs Q", to_string(s.command)));
    return *s.Q;
}

Resolved resolve(const ExperimentSpec& s, Precoder p)
{
    SchemeConfig cfg;
    cfg.L = s.L;
    cfg.snr_db = s.snr_db;
    cfg.precoder = p;
    cfg.Q = s.Q.value_or(1);
    if (s.lambda_states || s.gamma) {
        if (!s.lambda_states || !s.gamma)
            fail(ErrorCode::ConfigError, "lambda and gamma must be given together");
        cfg.lambda_states = *s.lambda_states;
        cfg.gamma = parse_gamma(*s.gamma, *s.lambda_states);
    } else {
        if (s.G < 1) fail(ErrorCode::InvalidArgument, "G must be positive");
        cfg.lambda_states = s.G;
        cfg.gamma = Rational::make(s.G - 1, s.G);
    }
    cfg.K = s.K.value_or(cfg.lambda_states * cfg.Q);
    // Without a stream count only the structural checks apply.
    if (!s.Q) cfg.precoder = Precoder::MF;
    const auto scheme = validate(cfg);

    Resolved r;
    r.G = scheme.G;
    if (s.K) r.B = scheme.B;
    r.p_t = scheme.p_t;
    r.model = s.csi;
    if (s.zeta) {
        if (!(*s.zeta >= 0.0)) fail(ErrorCode::InvalidArgument, "zeta must be >= 0");
        // Keep the G*L scaling so the cacheless side sees zeta / G.
        r.model.beta_tot = *s.zeta * s.csi.t_c * s.csi.w_c / (static_cast<double>(r.G) * s.L);
        r.zeta = *s.zeta;
    } else {
        r.zeta = s.csi.zeta(r.G, s.L);
    }
    return r;
}

CsvRow base_row(const ExperimentSpec& s, Precoder p, const Resolved& r)
{
    CsvRow row;
    row.precoder = p;
    row.L = s.L;
    row.G = r.G;
    row.snr_db = s.snr_db;
    row.zeta = r.zeta;
    return row;
}

CsvRow evaluate(const ExperimentSpec& s, Precoder p)
{
    const Resolved r = resolve(s, p);
    CsvRow row = base_row(s, p, r);
    switch (s.command) {
    case Command::Rate: {
        const int Q = require_q(s);
        const auto rep = effective_rate_with_zeta(p, RateInputs::from_streams(r.G, Q, s.L, r.p_t), r.zeta);
        row.Q = Q;
        row.c = rep.c;
        row.rate_nats = rep.avg_sum_rate_nats;
        row.effective_rate_nats = rep.effective_rate_nats;
        row.source = RateSource::ClosedForm;
        break;
    }
    case Command::Simulate: {
        const int Q = require_q(s);
        const auto scheme = minimal_scheme(r.G, Q, s.L, s.snr_db, p);
        const auto est = estimate_sum_rate(McConfig::make(scheme, s.trials, s.seed));
        for (const auto& w : est.warnings) fmt::print(stderr, "warning: {}\n", w);
        const double overhead = scheme.c * r.zeta;
        if (overhead > 1.0)
            fail(ErrorCode::CsiOverheadExceedsBlock, fmt::format("c*zeta = {} exceeds the block", overhead));
        row.Q = Q;
        row.c = scheme.c;
        row.rate_nats = est.mean;
        row.effective_rate_nats = (1.0 - overhead) * est.mean;
        row.source = RateSource::MonteCarlo;
        row.trials = est.trials;
        row.seed = s.seed;
        break;
    }
    case Command::Optimize: {
        const auto g = optimized_gain(p, r.G, s.L, r.p_t, r.model, r.B);
        const int Q = g.cached.q_star;
        row.Q = Q;
        row.c = static_cast<double>(Q) / s.L;
        row.rate_nats = raw_rate(p, RateInputs::from_streams(r.G, Q, s.L, r.p_t));
        row.effective_rate_nats = g.cached.effective_rate_at_q_star;
        row.source = RateSource::ClosedForm;
        row.c_star = g.cached.c_star;
        row.q_star = Q;
        row.gain = g.gain;
        break;
    }
    case Command::Gain: {
        const int Q = require_q(s);
        row.Q = Q;
        row.c = static_cast<double>(Q) / s.L;
        row.gain = effective_gain(p, r.G, Q, s.Q_prime.value_or(Q), s.L, r.p_t, r.model);
        break;
    }
    case Command::Sweep: fail(ErrorCode::ConfigError, "nested sweep");
    }
    return row;
}

ExperimentSpec at_point(const ExperimentSpec& s, double v)
{
    ExperimentSpec p = s;
    p.command = s.inner;
    p.axis.reset();
    const std::string& var = s.axis->variable;
    if (var == "snr_db")
        p.snr_db = v;
    else if (var == "Q")
        p.Q = as_int(v, "Q");
    else if (var == "L")
        p.L = as_int(v, "L");
    else if (var == "G") {
        p.G = as_int(v, "G");
        p.lambda_states.reset();
        p.gamma.reset();
    } else
        fail(ErrorCode::ConfigError, fmt::format("unknown sweep variable '{}'", var));
    return p;
}

std::string num(double v)
{
    return fmt::format("{}", v);
}

template <class T>
std::string opt(const std::optional<T>& v)
{
    return v ? fmt::format("{}", *v) : std::string{};
}

}  // namespace

std::string_view to_string(Command c)
{
    switch (c) {
    case Command::Rate: return "rate";
    case Command::Simulate: return "simulate";
    case Command::Optimize: return "optimize";
    case Command::Gain: return "gain";
    case Command::Sweep: return "sweep";
    }
    return "?";
}

std::optional<Command> parse_command(std::string_view name)
{
    for (Command c : {Command::Rate, Command::Simulate, Command::Optimize, Command::Gain, Command::Sweep})
        if (to_string(c) == name) return c;
    return std::nullopt;
}

std::vector<Precoder> parse_precoder_list(std::string_view text)
{
    if (text == "all") return {Precoder::MF, Precoder::ZF, Precoder::RZF};
    std::vector<Precoder> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        const auto p = parse_precoder(item);
        if (!p) fail(ErrorCode::ConfigError, fmt::format("unknown precoder '{}'", item));
        out.push_back(*p);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) fail(ErrorCode::ConfigError, "empty precoder list");
    return out;
}

std::vector<double> SweepAxis::points() const
{
    if (!(step > 0.0)) fail(ErrorCode::ConfigError, "sweep step must be > 0");
    if (stop < start) fail(ErrorCode::ConfigError, "sweep stop must be >= start");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = start + static_cast<double>(i) * step;
    return out;
}

ExperimentSpec preset(std::string_view name)
{
    ExperimentSpec s;
    s.preset = std::string(name);
    s.command = Command::Sweep;
    if (name == "fig1") {
        s.inner = Command::Rate;
        s.precoders = {Precoder::MF, Precoder::ZF, Precoder::RZF};
        s.L = 64;
        s.G = 5;
        s.snr_db = 10.0;
        s.axis = SweepAxis{"Q", 1, 63, 1};
    } else if (name == "fig2-L32" || name == "fig2-L64") {
        s.inner = Command::Optimize;
        s.L = name == "fig2-L32" ? 32 : 64;
        s.G = 6;
        s.snr_db = 20.0;
        s.axis = SweepAxis{"snr_db", 0, 25, 1};
    } else if (name == "fig3-L64") {
        s.inner = Command::Gain;
        s.L = 64;
        s.G = 6;
        s.Q = 8;
        s.Q_prime = 8;
        s.snr_db = 15.0;
        s.axis = SweepAxis{"snr_db", 0, 25, 1};
    } else {
        fail(ErrorCode::UnknownPreset, fmt::format("unknown preset '{}'", name));
    }
    return s;
}

std::vector<std::string> preset_names()
{
    return {"fig1", "fig2-L32", "fig2-L64", "fig3-L64"};
}

void apply_json(ExperimentSpec& spec, std::string_view json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, fmt::format("bad JSON config: {}", e.what()));
    }
    if (!j.is_object()) fail(ErrorCode::ConfigError, "JSON config must be an object");
    static const std::set<std::string> known{"preset", "precoder", "command", "of",   "L",     "Q",
                                             "Qprime", "G",        "lambda",  "gamma", "K",     "snr_db",
                                             "beta",   "tc",       "wc",      "zeta", "trials", "seed",
                                             "out",    "axis",     "start",   "stop", "step"};
    for (const auto& item : j.items())
        if (!known.count(item.key())) fail(ErrorCode::ConfigError, fmt::format("unknown config key '{}'", item.key()));

    try {
        if (j.contains("preset")) {
            const std::string keep_out = spec.out;
            spec = preset(j["preset"].get<std::string>());
            spec.out = keep_out;
        }
        if (j.contains("precoder")) {
            const auto& v = j["precoder"];
            if (v.is_array()) {
                spec.precoders.clear();
                for (const auto& item : v) {
                    const auto p = parse_precoder(item.get<std::string>());
                    if (!p) fail(ErrorCode::ConfigError, "unknown precoder in config");
                    spec.precoders.push_back(*p);
                }
            } else {
                spec.precoders = parse_precoder_list(v.get<std::string>());
            }
        }
        if (j.contains("command")) {
            const auto c = parse_command(j["command"].get<std::string>());
            if (!c) fail(ErrorCode::ConfigError, "unknown command in config");
            spec.command = *c;
        }
        if (j.contains("of")) {
            const auto c = parse_command(j["of"].get<std::string>());
            if (!c || *c == Command::Sweep) fail(ErrorCode::ConfigError, "bad 'of' in config");
            spec.inner = *c;
        }
        if (j.contains("L")) spec.L = j["L"].get<int>();
        if (j.contains("Q")) spec.Q = j["Q"].get<int>();
        if (j.contains("Qprime")) spec.Q_prime = j["Qprime"].get<int>();
        if (j.contains("G")) spec.G = j["G"].get<int>();
        if (j.contains("lambda")) spec.lambda_states = j["lambda"].get<int>();
        if (j.contains("gamma")) {
            const auto& g = j["gamma"];
            spec.gamma = g.is_string() ? g.get<std::string>() : fmt::format("{}", g.get<double>());
        }
        if (j.contains("K")) spec.K = j["K"].get<int>();
        if (j.contains("snr_db")) spec.snr_db = j["snr_db"].get<double>();
        if (j.contains("beta")) spec.csi.beta_tot = j["beta"].get<double>();
        if (j.contains("tc")) spec.csi.t_c = j["tc"].get<double>();
        if (j.contains("wc")) spec.csi.w_c = j["wc"].get<double>();
        if (j.contains("zeta")) spec.zeta = j["zeta"].get<double>();
        if (j.contains("trials")) spec.trials = j["trials"].get<int>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) spec.out = j["out"].get<std::string>();
        if (j.contains("axis") || j.contains("start") || j.contains("stop") || j.contains("step")) {
            SweepAxis a = spec.axis.value_or(SweepAxis{});
            if (j.contains("axis")) a.variable = j["axis"].get<std::string>();
            if (j.contains("start")) a.start = j["start"].get<double>();
            if (j.contains("stop")) a.stop = j["stop"].get<double>();
            if (j.contains("step")) a.step = j["step"].get<double>();
            spec.axis = a;
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, fmt::format("bad value in JSON config: {}", e.what()));
    }
}

std::vector<CsvRow> run(const ExperimentSpec& spec)
{
    if (spec.precoders.empty()) fail(ErrorCode::ConfigError, "no precoder selected");
    if (spec.command != Command::Sweep) {
        std::vector<CsvRow> rows;
        for (Precoder p : spec.precoders) rows.push_back(evaluate(spec, p));
        return rows;
    }

    if (!spec.axis) fail(ErrorCode::ConfigError, "sweep needs an axis");
    if (spec.inner == Command::Sweep) fail(ErrorCode::ConfigError, "nested sweep");
    const auto values = spec.axis->points();
    std::vector<ExperimentSpec> points;
    for (double v : values) points.push_back(at_point(spec, v));

    std::vector<std::vector<CsvRow>> per_point(points.size());
    auto body = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            for (Precoder p : spec.precoders) per_point[i].push_back(evaluate(points[i], p));
    };
    // Simulations already fan out over trials.
    if (spec.inner == Command::Simulate)
        body(0, points.size());
    else
        parallel_for(points.size(), body);

    std::vector<CsvRow> rows;
    for (auto& chunk : per_point)
        for (auto& r : chunk) rows.push_back(std::move(r));
    return rows;
}

std::string format_row(const CsvRow& r)
{
    const std::optional<double> bits =
        r.rate_nats ? std::optional<double>(*r.rate_nats / std::numbers::ln2) : std::nullopt;
    const std::string source = r.source ? std::string(to_string(*r.source)) : std::string{};
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", to_string(r.precoder), r.L,
                       opt(r.Q), r.G, num(r.snr_db), opt(r.zeta), opt(r.c), opt(r.rate_nats), opt(bits),
                       opt(r.effective_rate_nats), source, opt(r.trials), opt(r.seed), opt(r.c_star),
                       opt(r.q_star), opt(r.gain));
}

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows)
{
    os << kCsvHeader << '\n';
    for (const auto& r : rows) os << format_row(r) << '\n';
}

}  // namespace ccdl
