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

#ifndef SEMUPDATE_COMMON_ERROR_HPP_
#define SEMUPDATE_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace semupdate {

// Values are shared with the C API status codes in semupdate.h.
enum class ErrorCode {
  kOk = 0,
  kUnbalancedBrackets = 1,
  kUnknownSpan = 2,
  kEmptyInput = 3,
  kMalformedSequence = 4,
  kMissingV2Label = 5,
  kAmbiguousRules = 6,
  kInsufficientPartition = 7,
  kDegenerateGrammar = 8,
  kParseError = 9,
  kEmptyData = 10,
  kDuplicateHead = 11,
  kUnknownHead = 12,
  kMissingClassifier = 13,
  kSingleClassData = 14,
  kMultipleNewIntents = 15,
  kIncompleteGrid = 16,
  kDegenerateGap = 17,
  kIo = 18,
  kConfig = 19,
  kInvalidArgument = 20,
  kInternal = 21,
};

const char *ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message, int line = 0);

  ErrorCode code() const { return code_; }

  // 1-based source line for ParseError; 0 when not applicable.
  int line() const { return line_; }

 private:
  ErrorCode code_;
  int line_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string &message);

}  // namespace semupdate

#endif  // SEMUPDATE_COMMON_ERROR_HPP_
