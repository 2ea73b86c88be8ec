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

#include "ccdl/error.hpp"
#include "ccdl/experiment.hpp"
#include "ccdl/parallel.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct Flags {
    std::optional<std::string> precoder;
    std::optional<int> L, Q, Q_prime, G, lambda, K, trials;
    std::optional<std::string> gamma, preset, config, out, axis, of;
    std::optional<double> snr_db, beta, tc, wc, zeta, start, stop, step;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

void add_flags(CLI::App& app, Flags& f)
{
    app.add_option("--precoder", f.precoder, "mf, zf, rzf, a comma list, or all");
    app.add_option("--L", f.L, "transmit antennas");
    app.add_option("--Q", f.Q, "streams per group");
    app.add_option("--Qprime", f.Q_prime, "cacheless stream count for gain (default Q)");
    app.add_option("--G", f.G, "groups served per stage");
    app.add_option("--lambda", f.lambda, "cache states (with --gamma, replaces --G)");
    app.add_option("--gamma", f.gamma, "normalized cache size, p/q or decimal");
    app.add_option("--K", f.K, "total users");
    app.add_option("--snr-db", f.snr_db, "total transmit SNR in dB");
    app.add_option("--beta", f.beta, "pilot resources per user per block");
    app.add_option("--tc", f.tc, "coherence time in seconds");
    app.add_option("--wc", f.wc, "coherence bandwidth in Hz");
    app.add_option("--zeta", f.zeta, "CSI overhead per stream, overrides beta/tc/wc");
    app.add_option("--trials", f.trials, "Monte Carlo trials");
    app.add_option("--seed", f.seed, "Monte Carlo seed");
    app.add_option("--out", f.out, "CSV output path (default stdout)");
    app.add_option("--preset", f.preset, "fig1, fig2-L32, fig2-L64 or fig3-L64");
    app.add_option("--config", f.config, "JSON config; flags override its values");
    app.add_option("--axis", f.axis, "sweep variable: snr_db, Q, L or G");
    app.add_option("--start", f.start, "sweep start");
    app.add_option("--stop", f.stop, "sweep stop (inclusive)");
    app.add_option("--step", f.step, "sweep step");
    app.add_option("--of", f.of, "command evaluated at each sweep point");
    app.add_option("--threads", f.threads, "worker threads (0 = all cores; CCDL_THREADS also works)");
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) ccdl::fail(ccdl::ErrorCode::IoError, fmt::format("cannot read '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ccdl::ExperimentSpec build_spec(ccdl::Command command, const Flags& f)
{
    using namespace ccdl;
    ExperimentSpec s = f.preset ? preset(*f.preset) : ExperimentSpec{};
    const bool from_preset = f.preset.has_value();
    if (f.config) apply_json(s, read_file(*f.config));
    s.command = command;

    if (f.precoder) s.precoders = parse_precoder_list(*f.precoder);
    if (f.L) s.L = *f.L;
    if (f.Q) s.Q = *f.Q;
    if (f.Q_prime) s.Q_prime = *f.Q_prime;
    if (f.G) {
        s.G = *f.G;
        s.lambda_states.reset();
        s.gamma.reset();
    }
    if (f.lambda) s.lambda_states = *f.lambda;
    if (f.gamma) s.gamma = *f.gamma;
    if (f.K) s.K = *f.K;
    if (f.snr_db) s.snr_db = *f.snr_db;
    if (f.beta) s.csi.beta_tot = *f.beta;
    if (f.tc) s.csi.t_c = *f.tc;
    if (f.wc) s.csi.w_c = *f.wc;
    if (f.zeta) s.zeta = *f.zeta;
    if (f.trials) s.trials = *f.trials;
    if (f.seed) s.seed = *f.seed;
    if (f.out) s.out = *f.out;
    if (f.of) {
        const auto c = parse_command(*f.of);
        if (!c || *c == Command::Sweep) fail(ErrorCode::ConfigError, fmt::format("bad --of '{}'", *f.of));
        s.inner = *c;
    } else if (!from_preset && !f.config) {
        s.inner = Command::Rate;
    }
    if (f.axis || f.start || f.stop || f.step) {
        SweepAxis a = s.axis.value_or(SweepAxis{});
        if (f.axis) a.variable = *f.axis;
        if (f.start) a.start = *f.start;
        if (f.stop) a.stop = *f.stop;
        if (f.step) a.step = *f.step;
        s.axis = a;
    }
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Vector coded caching: rates, simulation and stream optimization"};
    app.require_subcommand(1);
    Flags flags;
    add_flags(app, flags);

    std::optional<ccdl::Command> chosen;
    const std::pair<ccdl::Command, const char*> commands[] = {
        {ccdl::Command::Rate, "closed-form sum rate and effective rate"},
        {ccdl::Command::Simulate, "Monte Carlo sum rate"},
        {ccdl::Command::Optimize, "optimal stream count and optimized gain"},
        {ccdl::Command::Gain, "effective gain at fixed stream counts"},
        {ccdl::Command::Sweep, "run --of over an axis"},
    };
    for (const auto& [c, help] : commands) {
        auto* sub = app.add_subcommand(std::string(ccdl::to_string(c)), help);
        sub->fallthrough();
        sub->callback([c = c, &chosen] { chosen = c; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (flags.threads) ccdl::set_worker_override(*flags.threads);
        const auto spec = build_spec(*chosen, flags);
        const auto rows = ccdl::run(spec);
        if (spec.out.empty()) {
            ccdl::write_csv(std::cout, rows);
        } else {
            std::ofstream out(spec.out);
            if (!out) ccdl::fail(ccdl::ErrorCode::IoError, fmt::format("cannot write '{}'", spec.out));
            ccdl::write_csv(out, rows);
            if (!out) ccdl::fail(ccdl::ErrorCode::IoError, fmt::format("write to '{}' failed", spec.out));
        }
    } catch (const ccdl::Error& e) {
        std::cerr << fmt::format("error: code={} message={}\n", ccdl::to_string(e.code()), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::cerr << fmt::format("error: code=Internal message={}\n", e.what());
        return 3;
    }
    return 0;
}
