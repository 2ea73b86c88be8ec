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

#include "ccdl/channel.hpp"

#include "ccdl/error.hpp"
#include "ccdl/kernels.hpp"
#include "ccdl/parallel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <vector>

namespace ccdl {

ChannelMatrix draw_channel(int Q, int L, RandomStream& stream)
{
    if (Q < 0 || L < 1) fail(ErrorCode::InvalidArgument, fmt::format("bad channel shape {}x{}", Q, L));
    ChannelMatrix out{CMatrix(Q, L)};
    for (int k = 0; k < Q; ++k)
        for (int l = 0; l < L; ++l) out.h(k, l) = stream.complex_normal();
    return out;
}

ChannelMatrix draw_channel(int Q, int L, RngSeed rng)
{
    RandomStream stream(rng);
    return draw_channel(Q, L, stream);
}

CMatrix without_row(const CMatrix& h, int k)
{
    CMatrix out(h.rows() - 1, h.cols());
    out.topRows(k) = h.topRows(k);
    out.bottomRows(h.rows() - 1 - k) = h.bottomRows(h.rows() - 1 - k);
    return out;
}

bool factor_gram(const CMatrix& gram, Eigen::LLT<CMatrix>& llt)
{
    llt.compute(gram);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().real();
    if (pivots.size() == 0) return true;
    const double lo = pivots.minCoeff();
    const double hi = pivots.maxCoeff();
    return lo > 0.0 && (lo * lo) / (hi * hi) > 1e-14;
}

InverseTraceEstimate wishart_inv_trace_mc(int Q, int L, int trials, std::uint64_t seed)
{
    if (Q < 1 || L <= Q)
        fail(ErrorCode::PreconditionViolated, fmt::format("need L > Q >= 1, got Q={} L={}", Q, L));
    if (trials < 1) fail(ErrorCode::InvalidArgument, "trials must be >= 1");

    std::vector<double> traces(static_cast<std::size_t>(trials));
    std::vector<int> retries(static_cast<std::size_t>(trials), 0);
    parallel_for(traces.size(), [&](std::size_t begin, std::size_t end) {
        Eigen::LLT<CMatrix> llt;
        for (std::size_t t = begin; t < end; ++t) {
            for (std::uint32_t attempt = 0;; ++attempt) {
                const auto h = draw_channel(Q, L, trial_stream(seed, t, attempt));
                if (factor_gram(h.h * h.h.adjoint(), llt)) {
                    const CMatrix inv = llt.solve(CMatrix::Identity(Q, Q));
                    traces[t] = inv.trace().real();
                    break;
                }
                if (attempt >= 16) fail(ErrorCode::SingularDraw, "repeated singular Wishart draws");
                ++retries[t];
            }
        }
    });

    InverseTraceEstimate est;
    est.trials = trials;
    est.mean = compensated_sum(traces) / trials;
    CompensatedSum ss;
    for (double x : traces) ss.add((x - est.mean) * (x - est.mean));
    est.std_error = trials > 1 ? std::sqrt(ss.value() / (trials - 1) / trials) : 0.0;
    for (int r : retries) est.resampled += r;
    return est;
}

namespace {

// Eigenvalues of (1/L) H^H H that can be nonzero, clamped at zero, plus the
// count of structural zeros.
std::pair<Eigen::VectorXd, Eigen::Index> scaled_spectrum(const CMatrix& h)
{
    const auto q = h.rows();
    const auto l = h.cols();
    const double inv_l = 1.0 / static_cast<double>(l);
    Eigen::VectorXd eig;
    if (q == 0) return {eig, l};
    if (q <= l) {
        const CMatrix gram = (h * h.adjoint()) * inv_l;
        eig = Eigen::SelfAdjointEigenSolver<CMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    } else {
        const CMatrix gram = (h.adjoint() * h) * inv_l;
        eig = Eigen::SelfAdjointEigenSolver<CMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    }
    eig = eig.cwiseMax(0.0);
    return {eig, l - eig.size()};
}

}  // namespace

double resolvent_trace(const CMatrix& h, double z)
{
    if (!(z > 0.0)) fail(ErrorCode::DomainError, "resolvent_trace needs z > 0");
    const auto [eig, zeros] = scaled_spectrum(h);
    const auto m = kernels::resolvent_moments({eig.data(), static_cast<std::size_t>(eig.size())}, z);
    return (m.first + static_cast<double>(zeros) / z) / static_cast<double>(h.cols());
}

double resolvent_trace_sq(const CMatrix& h, double z)
{
    if (!(z > 0.0)) fail(ErrorCode::DomainError, "resolvent_trace_sq needs z > 0");
    const auto [eig, zeros] = scaled_spectrum(h);
    const auto m = kernels::resolvent_moments({eig.data(), static_cast<std::size_t>(eig.size())}, z);
    return (m.second + static_cast<double>(zeros) / (z * z)) / static_cast<double>(h.cols());
}

}  // namespace ccdl
