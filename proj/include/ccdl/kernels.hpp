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

// Data-parallel inner loops of the simulator. Each kernel has a portable
// scalar reference and, where the CPU allows, a SIMD variant chosen once at
// startup. Variants are bit-identical to the reference: reductions use four
// striped partial sums (element i goes to partial i % 4 for the largest
// multiple of four), combined as (p0 + p1) + (p2 + p3), then the tail is
// added in index order. Nothing here may be compiled with FMA contraction.
//
// Override the choice with CCDL_KERNEL=scalar|avx2|auto.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace ccdl::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

struct ResolventMoments {
    double first = 0.0;   // sum 1/(lambda_i + z)
    double second = 0.0;  // sum 1/(lambda_i + z)^2
};

using cplx = std::complex<double>;

struct Table {
    Isa isa;
    /// out[i] = |in[i]|^2
    void (*abs2)(const cplx* in, std::size_t n, double* out);
    /// sum |in[i]|^2, striped
    double (*sum_abs2)(const cplx* in, std::size_t n);
    /// gains is a column-major q x q matrix of composite gains h_k^T v_j.
    /// signal[k] = |g_kk|^2, interference[k] = sum_{j != k} |g_kj|^2 summed
    /// in j order. scratch must hold q*q doubles.
    void (*signal_interference)(const cplx* gains, std::size_t q, double* signal,
                                double* interference, double* scratch);
    /// out[i] = scale*signal[i] / (1 + scale*interference[i])
    void (*sinr)(const double* signal, const double* interference, std::size_t n, double scale,
                 double* out);
    /// striped sums over eigenvalues
    ResolventMoments (*resolvent_moments)(const double* eig, std::size_t n, double z);
    /// max_i |a[i] - b[i]|
    double (*max_abs_diff)(const cplx* a, const cplx* b, std::size_t n);
};

const Table& scalar_table();

/// nullptr when the variant is not compiled in or the CPU lacks it.
const Table* table_for(Isa isa);

/// The process-wide choice.
const Table& active();

inline double sum_abs2(std::span<const cplx> v)
{
    return active().sum_abs2(v.data(), v.size());
}

inline ResolventMoments resolvent_moments(std::span<const double> eig, double z)
{
    return active().resolvent_moments(eig.data(), eig.size(), z);
}

inline double max_abs_diff(std::span<const cplx> a, std::span<const cplx> b)
{
    return active().max_abs_diff(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace ccdl::kernels
