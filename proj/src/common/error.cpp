// Copyright 2026 The semupdate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "common/error.hpp"

namespace semupdate {

const char *ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kOk: return "Ok";
    case ErrorCode::kUnbalancedBrackets: return "UnbalancedBrackets";
    case ErrorCode::kUnknownSpan: return "UnknownSpan";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMalformedSequence: return "MalformedSequence";
    case ErrorCode::kMissingV2Label: return "MissingV2Label";
    case ErrorCode::kAmbiguousRules: return "AmbiguousRules";
    case ErrorCode::kInsufficientPartition: return "InsufficientPartition";
    case ErrorCode::kDegenerateGrammar: return "DegenerateGrammar";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kEmptyData: return "EmptyData";
    case ErrorCode::kDuplicateHead: return "DuplicateHead";
    case ErrorCode::kUnknownHead: return "UnknownHead";
    case ErrorCode::kMissingClassifier: return "MissingClassifier";
    case ErrorCode::kSingleClassData: return "SingleClassData";
    case ErrorCode::kMultipleNewIntents: return "MultipleNewIntents";
    case ErrorCode::kIncompleteGrid: return "IncompleteGrid";
    case ErrorCode::kDegenerateGap: return "DegenerateGap";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message, int line)
    : std::runtime_error(message), code_(code), line_(line) {}

void Fail(ErrorCode code, const std::string &message) {
  throw Error(code, message);
}

}  // namespace semupdate
