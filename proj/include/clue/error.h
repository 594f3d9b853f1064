// Copyright 2026 The CLUE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLUE_ERROR_H_
#define CLUE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace clue {

enum class ErrorKind {
  kInvalidInput,
  kConfig,
  kBackendUnavailable,
  kBackendProtocol,
  kDegenerateOutput,
  kInputTooLong,
  kExtractionParse,
  kSchema,
  kUndefinedCorrelation,
  kMetricUndefined,
  kEvaluationEmpty,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// All library failures are reported as clue::Error. The kind is stable and
// machine readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  // Returns a copy whose message is prefixed with `context: `.
  Error WithContext(std::string_view context) const {
    return Error(kind_, std::string(context) + ": " + what());
  }

 private:
  ErrorKind kind_;
};

}  // namespace clue

#endif  // CLUE_ERROR_H_
