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

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

namespace ccdl {

/// Worker cap from CCDL_THREADS (0 or unset means hardware concurrency),
/// unless overridden in-process.
std::size_t worker_count();

/// In-process override of CCDL_THREADS; nullopt restores the environment.
void set_worker_override(std::optional<std::size_t> workers);

/// Runs body(begin, end) over contiguous chunks of [0, n). Work items must
/// write only to their own slots; callers reduce in index order afterwards,
/// which keeps results independent of the worker count. The first exception
/// thrown by any chunk is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t workers = worker_count());

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

double compensated_sum(std::span<const double> values);

}  // namespace ccdl
