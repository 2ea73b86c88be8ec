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

#include <cmath>

namespace ccdl::kernels {

namespace {

inline double norm2(const cplx& z)
{
    return z.real() * z.real() + z.imag() * z.imag();
}

void abs2_scalar(const cplx* in, std::size_t n, double* out)
{
    for (std::size_t i = 0; i < n; ++i) out[i] = norm2(in[i]);
}

double sum_abs2_scalar(const cplx* in, std::size_t n)
{
    double p[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        p[0] += norm2(in[i]);
        p[1] += norm2(in[i + 1]);
        p[2] += norm2(in[i + 2]);
        p[3] += norm2(in[i + 3]);
    }
    double total = (p[0] + p[1]) + (p[2] + p[3]);
    for (std::size_t i = n4; i < n; ++i) total += norm2(in[i]);
    return total;
}

void signal_interference_scalar(const cplx* gains, std::size_t q, double* signal,
                                double* interference, double* scratch)
{
    abs2_scalar(gains, q * q, scratch);
    for (std::size_t k = 0; k < q; ++k) {
        signal[k] = scratch[k + k * q];
        scratch[k + k * q] = 0.0;
        interference[k] = 0.0;
    }
    for (std::size_t j = 0; j < q; ++j) {
        const double* col = scratch + j * q;
        for (std::size_t k = 0; k < q; ++k) interference[k] += col[k];
    }
}

void sinr_scalar(const double* signal, const double* interference, std::size_t n, double scale,
                 double* out)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double num = scale * signal[i];
        const double den = 1.0 + scale * interference[i];
        out[i] = num / den;
    }
}

ResolventMoments resolvent_moments_scalar(const double* eig, std::size_t n, double z)
{
    double f[4] = {0.0, 0.0, 0.0, 0.0};
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n4 = n - n % 4;
    for (std::size_t i = 0; i < n4; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double t = 1.0 / (eig[i + j] + z);
            f[j] += t;
            s[j] += t * t;
        }
    }
    ResolventMoments m{(f[0] + f[1]) + (f[2] + f[3]), (s[0] + s[1]) + (s[2] + s[3])};
    for (std::size_t i = n4; i < n; ++i) {
        const double t = 1.0 / (eig[i] + z);
        m.first += t;
        m.second += t * t;
    }
    return m;
}

double max_abs_diff_scalar(const cplx* a, const cplx* b, std::size_t n)
{
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::sqrt(norm2(a[i] - b[i]));
        if (d > m) m = d;
    }
    return m;
}

}  // namespace

const Table& scalar_table()
{
    static const Table t{Isa::Scalar,
                         abs2_scalar,
                         sum_abs2_scalar,
                         signal_interference_scalar,
                         sinr_scalar,
                         resolvent_moments_scalar,
                         max_abs_diff_scalar};
    return t;
}

}  // namespace ccdl::kernels
