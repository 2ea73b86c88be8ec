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

#include "ccdl/kernels.hpp"
#include "ccdl/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

using namespace ccdl;
using kernels::cplx;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed)
{
    RandomStream s({seed, n});
    std::vector<cplx> v(n);
    for (auto& x : v) x = s.complex_normal() * 3.0;
    return v;
}

std::vector<double> random_positive(std::size_t n, std::uint64_t seed)
{
    RandomStream s({seed, n + 1000});
    std::vector<double> v(n);
    for (auto& x : v) x = -std::log(s.uniform()) * 5.0;
    return v;
}

bool same_bits(double a, double b)
{
    return std::memcmp(&a, &b, sizeof a) == 0;
}

// Straight loops following the documented contract.
double naive_sum_abs2(const std::vector<cplx>& v)
{
    double p[4] = {0, 0, 0, 0};
    const std::size_t body = v.size() / 4 * 4;
    for (std::size_t i = 0; i < body; ++i) p[i % 4] += v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
    double s = (p[0] + p[1]) + (p[2] + p[3]);
    for (std::size_t i = body; i < v.size(); ++i) s += v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
    return s;
}

const std::vector<std::size_t> kSizes{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 127, 1000, 1027};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table follows the reduction contract")
{
    const auto& t = kernels::scalar_table();
    for (std::size_t n : kSizes) {
        const auto v = random_complex(n, 1);
        CHECK(same_bits(t.sum_abs2(v.data(), n), naive_sum_abs2(v)));
        std::vector<double> out(n);
        t.abs2(v.data(), n, out.data());
        for (std::size_t i = 0; i < n; ++i)
            CHECK(same_bits(out[i], v[i].real() * v[i].real() + v[i].imag() * v[i].imag()));
    }
}

TEST_CASE("scalar signal/interference split")
{
    const auto& t = kernels::scalar_table();
    for (std::size_t q : {1ul, 2ul, 3ul, 5ul, 8ul, 13ul}) {
        const auto g = random_complex(q * q, 2);
        std::vector<double> s(q), i(q), scratch(q * q);
        t.signal_interference(g.data(), q, s.data(), i.data(), scratch.data());
        for (std::size_t k = 0; k < q; ++k) {
            CHECK(s[k] == doctest::Approx(std::norm(g[k + k * q])).epsilon(1e-15));
            double acc = 0.0;
            for (std::size_t j = 0; j < q; ++j)
                if (j != k) acc += std::norm(g[k + j * q]);
            CHECK(i[k] == doctest::Approx(acc).epsilon(1e-13));
        }
    }
}

TEST_CASE("scalar resolvent moments and max difference")
{
    const auto& t = kernels::scalar_table();
    const auto eig = random_positive(37, 3);
    const auto m = t.resolvent_moments(eig.data(), eig.size(), 0.7);
    double a = 0.0, b = 0.0;
    for (double e : eig) {
        a += 1.0 / (e + 0.7);
        b += 1.0 / ((e + 0.7) * (e + 0.7));
    }
    CHECK(m.first == doctest::Approx(a).epsilon(1e-14));
    CHECK(m.second == doctest::Approx(b).epsilon(1e-14));

    auto x = random_complex(19, 4);
    auto y = x;
    CHECK(t.max_abs_diff(x.data(), y.data(), x.size()) == 0.0);
    y[11] += cplx(3.0, 4.0);
    CHECK(t.max_abs_diff(x.data(), y.data(), x.size()) == doctest::Approx(5.0).epsilon(1e-12));

    std::vector<double> sig{1.0, 2.0, 0.0}, intf{0.0, 1.0, 5.0}, out(3);
    t.sinr(sig.data(), intf.data(), 3, 2.0, out.data());
    CHECK(out[0] == 2.0);
    CHECK(out[1] == doctest::Approx(4.0 / 3.0));
    CHECK(out[2] == 0.0);
}

TEST_CASE("SIMD variants are bit-identical to the scalar reference")
{
    const auto* simd = kernels::table_for(kernels::Isa::Avx2);
    if (!simd) {
        MESSAGE("no AVX2 on this host; equivalence not exercised");
        return;
    }
    const auto& ref = kernels::scalar_table();
    for (std::size_t n : kSizes) {
        const auto v = random_complex(n, 10 + n);
        CHECK(same_bits(simd->sum_abs2(v.data(), n), ref.sum_abs2(v.data(), n)));

        std::vector<double> a(n), b(n);
        simd->abs2(v.data(), n, a.data());
        ref.abs2(v.data(), n, b.data());
        CHECK(std::memcmp(a.data(), b.data(), n * sizeof(double)) == 0);

        const auto eig = random_positive(n, 20 + n);
        for (double z : {1e-3, 0.1, 10.0}) {
            const auto ma = simd->resolvent_moments(eig.data(), n, z);
            const auto mb = ref.resolvent_moments(eig.data(), n, z);
            CHECK(same_bits(ma.first, mb.first));
            CHECK(same_bits(ma.second, mb.second));
        }

        const auto w = random_complex(n, 30 + n);
        CHECK(same_bits(simd->max_abs_diff(v.data(), w.data(), n), ref.max_abs_diff(v.data(), w.data(), n)));

        const auto sig = random_positive(n, 40 + n);
        const auto intf = random_positive(n, 50 + n);
        std::vector<double> sa(n), sb(n);
        simd->sinr(sig.data(), intf.data(), n, 0.37, sa.data());
        ref.sinr(sig.data(), intf.data(), n, 0.37, sb.data());
        CHECK(std::memcmp(sa.data(), sb.data(), n * sizeof(double)) == 0);
    }
    for (std::size_t q = 1; q <= 70; q += (q < 10 ? 1 : 9)) {
        const auto g = random_complex(q * q, 60 + q);
        std::vector<double> s1(q), i1(q), s2(q), i2(q), scratch(q * q);
        simd->signal_interference(g.data(), q, s1.data(), i1.data(), scratch.data());
        ref.signal_interference(g.data(), q, s2.data(), i2.data(), scratch.data());
        CHECK(std::memcmp(s1.data(), s2.data(), q * sizeof(double)) == 0);
        CHECK(std::memcmp(i1.data(), i2.data(), q * sizeof(double)) == 0);
    }
}

TEST_CASE("dispatch honours the CCDL_KERNEL choice")
{
    const auto& t = kernels::active();
    const char* env = std::getenv("CCDL_KERNEL");
    if (env && std::string_view(env) == "scalar") CHECK(t.isa == kernels::Isa::Scalar);
    if (!env || std::string_view(env) == "auto")
        CHECK(t.isa == (kernels::table_for(kernels::Isa::Avx2) ? kernels::Isa::Avx2 : kernels::Isa::Scalar));
}

}
