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

#include "ccdl/error.hpp"

namespace ccdl {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::NonIntegerLambdaGamma: return "NonIntegerLambdaGamma";
    case ErrorCode::KNotMultipleOfLambda: return "KNotMultipleOfLambda";
    case ErrorCode::QExceedsGroupSize: return "QExceedsGroupSize";
    case ErrorCode::QExceedsAntennas: return "QExceedsAntennas";
    case ErrorCode::NoFeasibleLambda: return "NoFeasibleLambda";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::SingularDraw: return "SingularDraw";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ExactUnavailable: return "ExactUnavailable";
    case ErrorCode::COutOfRange: return "COutOfRange";
    case ErrorCode::NonPositiveB: return "NonPositiveB";
    case ErrorCode::CsiOverheadExceedsBlock: return "CsiOverheadExceedsBlock";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnboundedObjective: return "UnboundedObjective";
    case ErrorCode::NoRootInBracket: return "NoRootInBracket";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::EmptyFeasibleSet: return "EmptyFeasibleSet";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

}  // namespace ccdl
