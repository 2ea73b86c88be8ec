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

#include "ccdl/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ccdl {

/// Exact non-negative fraction, always stored in lowest terms with den > 0.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Snaps a floating cache fraction to the nearest fraction with denominator
/// <= max_den, accepting it only within 1e-9. Throws NonIntegerLambdaGamma
/// when no such fraction exists (no integer Lambda*gamma is then possible).
Rational snap_gamma(double gamma, int max_den);

/// Parses "p/q" or a decimal; decimals go through snap_gamma.
Rational parse_gamma(const std::string& text, int max_den);

struct SchemeConfig {
    int L = 1;
    double snr_db = 0.0;
    int lambda_states = 1;
    Rational gamma;
    int K = 1;
    int Q = 1;
    Precoder precoder = Precoder::MF;
};

struct ValidatedScheme {
    SchemeConfig config;
    int G = 1;                         // groups served per stage, Lambda*gamma + 1
    int B = 1;                         // users per group, K / Lambda
    double c = 0.0;                    // Q / L
    double p_t = 1.0;                  // linear transmit power
    std::uint64_t subpacketization = 1;  // C(Lambda, Lambda*gamma)

    int cached_states() const { return G - 1; }
};

ValidatedScheme validate(const SchemeConfig& config);

/// Smallest scheme with the given G and Q: Lambda = G, gamma = (G-1)/G and
/// K = G*Q, so every group has exactly Q users.
ValidatedScheme minimal_scheme(int G, int Q, int L, double snr_db, Precoder precoder);

/// C(n, k), or nullopt when the value does not fit in 64 bits.
std::optional<std::uint64_t> binomial(int n, int k);

/// Sorted 1-based group labels.
using GroupSet = std::vector<int>;

/// Calls fn for every k-subset of {1..n} in lexicographic order.
void for_each_subset(int n, int k, const std::function<void(const GroupSet&)>& fn);

/// Members of group g (1-based): { b*Lambda + g : b = 0..B-1 }.
std::vector<int> group_members(int group, int lambda_states, int B);

struct GroupDelivery {
    int group = 0;
    GroupSet label;          // subfile label T = Psi \ {group}
    std::vector<int> users;  // served users of this group in this round
};

struct Stage {
    int round = 0;
    GroupSet groups;  // Psi
    std::vector<GroupDelivery> deliveries;
};

struct DeliveryPlan {
    int rounds = 0;
    std::uint64_t stages_per_round = 0;
    std::vector<Stage> stages;  // round-major, lexicographic Psi within a round
};

DeliveryPlan build_delivery_plan(const ValidatedScheme& scheme);

struct GainChoice {
    int lambda_states = 0;
    int G = 0;
};

/// Largest coded caching gain whose subpacketization fits the budget.
GainChoice max_gain(Rational gamma, std::uint64_t subpack_budget);

}  // namespace ccdl
