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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ccdl {

/// Every failure the library can report. The CLI prints the enumerator name
/// verbatim, so renaming one is a breaking change of the error-line format.
enum class ErrorCode {
    InvalidArgument,
    GammaOutOfRange,
    NonIntegerLambdaGamma,
    KNotMultipleOfLambda,
    QExceedsGroupSize,
    QExceedsAntennas,
    NoFeasibleLambda,
    PreconditionViolated,
    SingularDraw,
    RankDeficient,
    ExactUnavailable,
    COutOfRange,
    NonPositiveB,
    CsiOverheadExceedsBlock,
    ZeroDenominator,
    DomainError,
    UnboundedObjective,
    NoRootInBracket,
    NoConvergence,
    EmptyFeasibleSet,
    UnknownPreset,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ccdl
