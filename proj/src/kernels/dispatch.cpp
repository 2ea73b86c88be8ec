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

#include <cstdio>
#include <cstdlib>
#include <string_view>

namespace ccdl::kernels {

#if defined(CCDL_HAVE_AVX2)
const Table& avx2_table();
#endif

std::string_view to_string(Isa isa)
{
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    }
    return "?";
}

const Table* table_for(Isa isa)
{
    switch (isa) {
    case Isa::Scalar: return &scalar_table();
    case Isa::Avx2:
#if defined(CCDL_HAVE_AVX2)
        if (__builtin_cpu_supports("avx2")) return &avx2_table();
#endif
        return nullptr;
    }
    return nullptr;
}

namespace {

const Table& choose()
{
    const char* env = std::getenv("CCDL_KERNEL");
    const std::string_view want = env ? env : "auto";
    if (want == "scalar") return scalar_table();
    if (const Table* t = table_for(Isa::Avx2)) return *t;
    if (want == "avx2") std::fprintf(stderr, "ccdl: avx2 kernels unavailable, using scalar\n");
    return scalar_table();
}

}  // namespace

const Table& active()
{
    static const Table& t = choose();
    return t;
}

}  // namespace ccdl::kernels
