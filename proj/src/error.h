/* Copyright 2026 The xfsm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XFSM_ERROR_H_
#define XFSM_ERROR_H_

#include <stdexcept>
#include <string>

namespace xfsm {

// Values are part of the C ABI (see include/xfsm.h); append only.
enum class ErrorCode : int {
  kFrameTooShort = 1,
  kMalformedHeader,
  kFieldAbsent,
  kValueOverflow,
  kNoLabel,
  kWidthMismatch,
  kTableFull,
  kInvalidPattern,
  kUnknownHandle,
  kInvalidScope,
  kIncompatibleScopes,
  kNoDefaultEntry,
  kUnknownAction,
  kInvalidEntry,
  kUnknownTable,
  kUnknownMeter,
  kStateTableNotEmpty,
  kTruncated,
  kBadCommand,
  kBadLength,
  kBadMessage,
  kSchemaError,
  kInvalidArgument,
  kIoError,
};

const char *error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) { }

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xfsm

#endif  // XFSM_ERROR_H_
