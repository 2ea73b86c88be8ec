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

#include <optional>
#include <string_view>

namespace ccdl {

enum class Precoder { MF, ZF, RZF };

std::string_view to_string(Precoder p);
std::optional<Precoder> parse_precoder(std::string_view name);

/// Linear power from an SNR in dB (noise variance is 1).
double db_to_linear(double db);

}  // namespace ccdl
