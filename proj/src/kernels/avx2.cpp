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

#include <immintrin.h>

#include <cmath>

namespace ccdl::kernels {

namespace {

// Two complex values per 256-bit register, stored [re0 im0 re1 im1].
inline __m256d load2(const cplx* p)
{
    return _mm256_loadu_pd(reinterpret_cast<const double*>(p));
}

// |z|^2 of four consecutive complex values in lane order [z0 z2 z1 z3].
inline __m256d norm4_shuffled(const cplx* p)
{
    const __m256d a = load2(p);
    const __m256d b = load2(p + 2);
    return _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
}

inline double norm2(const cplx& z)
{
    return z.real() * z.real() + z.imag() * z.imag();
}

void abs2_avx2(const cplx* in, std::size_t n, double* out)
{
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d v = _mm256_permute4x64_pd(norm4_shuffled(in + i), 0xD8);
        _mm256_storeu_pd(out + i, v);
    }
    for (std::size_t i = n4; i < n; ++i) out[i] = norm2(in[i]);
}

double sum_abs2_avx2(const cplx* in, std::size_t n)
{
    // Lanes hold partials [p0 p2 p1 p3].
    __m256d acc = _mm256_setzero_pd();
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) acc = _mm256_add_pd(acc, norm4_shuffled(in + i));
    alignas(32) double p[4];
    _mm256_store_pd(p, acc);
    double total = (p[0] + p[2]) + (p[1] + p[3]);
    for (std::size_t i = n4; i < n; ++i) total += norm2(in[i]);
    return total;
}

void signal_interference_avx2(const cplx* gains, std::size_t q, double* signal,
                              double* interference, double* scratch)
{
    abs2_avx2(gains, q * q, scratch);
    for (std::size_t k = 0; k < q; ++k) {
        signal[k] = scratch[k + k * q];
        scratch[k + k * q] = 0.0;
        interference[k] = 0.0;
    }
    const std::size_t q4 = q - q % 4;
    for (std::size_t j = 0; j < q; ++j) {
        const double* col = scratch + j * q;
        for (std::size_t k = 0; k < q4; k += 4) {
            const __m256d s = _mm256_add_pd(_mm256_loadu_pd(interference + k), _mm256_loadu_pd(col + k));
            _mm256_storeu_pd(interference + k, s);
        }
        for (std::size_t k = q4; k < q; ++k) interference[k] += col[k];
    }
}

void sinr_avx2(const double* signal, const double* interference, std::size_t n, double scale,
               double* out)
{
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d one = _mm256_set1_pd(1.0);
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d num = _mm256_mul_pd(vs, _mm256_loadu_pd(signal + i));
        const __m256d den = _mm256_add_pd(one, _mm256_mul_pd(vs, _mm256_loadu_pd(interference + i)));
        _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
    }
    for (std::size_t i = n4; i < n; ++i) {
        const double num = scale * signal[i];
        const double den = 1.0 + scale * interference[i];
        out[i] = num / den;
    }
}

ResolventMoments resolvent_moments_avx2(const double* eig, std::size_t n, double z)
{
    const __m256d vz = _mm256_set1_pd(z);
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d f = _mm256_setzero_pd();
    __m256d s = _mm256_setzero_pd();
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d t = _mm256_div_pd(one, _mm256_add_pd(_mm256_loadu_pd(eig + i), vz));
        f = _mm256_add_pd(f, t);
        s = _mm256_add_pd(s, _mm256_mul_pd(t, t));
    }
    alignas(32) double fp[4];
    alignas(32) double sp[4];
    _mm256_store_pd(fp, f);
    _mm256_store_pd(sp, s);
    ResolventMoments m{(fp[0] + fp[1]) + (fp[2] + fp[3]), (sp[0] + sp[1]) + (sp[2] + sp[3])};
    for (std::size_t i = n4; i < n; ++i) {
        const double t = 1.0 / (eig[i] + z);
        m.first += t;
        m.second += t * t;
    }
    return m;
}

double max_abs_diff_avx2(const cplx* a, const cplx* b, std::size_t n)
{
    __m256d m = _mm256_setzero_pd();
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d d0 = _mm256_sub_pd(load2(a + i), load2(b + i));
        const __m256d d1 = _mm256_sub_pd(load2(a + i + 2), load2(b + i + 2));
        const __m256d sq = _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
        m = _mm256_max_pd(_mm256_sqrt_pd(sq), m);
    }
    alignas(32) double mp[4];
    _mm256_store_pd(mp, m);
    double out = 0.0;
    for (double v : mp)
        if (v > out) out = v;
    for (std::size_t i = n4; i < n; ++i) {
        const double d = std::sqrt(norm2(a[i] - b[i]));
        if (d > out) out = d;
    }
    return out;
}

}  // namespace

const Table& avx2_table()
{
    static const Table t{Isa::Avx2,
                         abs2_avx2,
                         sum_abs2_avx2,
                         signal_interference_avx2,
                         sinr_avx2,
                         resolvent_moments_avx2,
                         max_abs_diff_avx2};
    return t;
}

}  // namespace ccdl::kernels
