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

#include "ccdl/analytic.hpp"
#include "ccdl/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccdl {

enum class Command { Rate, Simulate, Optimize, Gain, Sweep };

std::string_view to_string(Command c);
/// "mf", "zf,rzf", "all", ...
std::vector<Precoder> parse_precoder_list(std::string_view text);
std::optional<Command> parse_command(std::string_view name);

struct SweepAxis {
    std::string variable;  // snr_db, Q, L or G
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    std::vector<double> points() const;
};

struct ExperimentSpec {
    Command command = Command::Rate;
    Command inner = Command::Rate;  // what each sweep point evaluates
    std::vector<Precoder> precoders{Precoder::ZF};

    int L = 64;
    std::optional<int> Q;
    std::optional<int> Q_prime;
    int G = 1;
    std::optional<int> lambda_states;  // with gamma, replaces G
    std::optional<std::string> gamma;
    std::optional<int> K;
    double snr_db = 10.0;

    CsiCostModel csi;
    std::optional<double> zeta;  // overrides the CSI model

    int trials = 1000;
    std::uint64_t seed = 1;
    std::optional<SweepAxis> axis;
    std::string out;  // empty: standard output
    std::string preset;
};

/// fig1, fig2-L32, fig2-L64, fig3-L64. Throws UnknownPreset.
ExperimentSpec preset(std::string_view name);
std::vector<std::string> preset_names();

/// Overwrites the fields present in a JSON object whose keys are the CLI
/// flag names (precoder, L, Q, Qprime, G, lambda, gamma, K, snr_db, beta,
/// tc, wc, zeta, trials, seed, axis, start, stop, step, of, out, preset).
void apply_json(ExperimentSpec& spec, std::string_view json_text);

/// One output line; unset fields print empty.
struct CsvRow {
    Precoder precoder = Precoder::MF;
    int L = 0;
    std::optional<int> Q;
    int G = 1;
    double snr_db = 0.0;
    std::optional<double> zeta;
    std::optional<double> c;
    std::optional<double> rate_nats;
    std::optional<double> effective_rate_nats;
    std::optional<RateSource> source;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<double> c_star;
    std::optional<int> q_star;
    std::optional<double> gain;
};

inline constexpr std::string_view kCsvHeader =
    "precoder,L,Q,G,snr_db,zeta,c,rate_nats,rate_bits,effective_rate_nats,source,trials,seed,"
    "c_star,q_star,gain";

/// Rows in sweep-axis order, precoders in the order given for each point.
std::vector<CsvRow> run(const ExperimentSpec& spec);

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows);
std::string format_row(const CsvRow& row);

}  // namespace ccdl
