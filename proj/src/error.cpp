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

#include "error.h"

namespace xfsm {

const char *error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFrameTooShort: return "FrameTooShort";
    case ErrorCode::kMalformedHeader: return "MalformedHeader";
    case ErrorCode::kFieldAbsent: return "FieldAbsent";
    case ErrorCode::kValueOverflow: return "ValueOverflow";
    case ErrorCode::kNoLabel: return "NoLabel";
    case ErrorCode::kWidthMismatch: return "WidthMismatch";
    case ErrorCode::kTableFull: return "TableFull";
    case ErrorCode::kInvalidPattern: return "InvalidPattern";
    case ErrorCode::kUnknownHandle: return "UnknownHandle";
    case ErrorCode::kInvalidScope: return "InvalidScope";
    case ErrorCode::kIncompatibleScopes: return "IncompatibleScopes";
    case ErrorCode::kNoDefaultEntry: return "NoDefaultEntry";
    case ErrorCode::kUnknownAction: return "UnknownAction";
    case ErrorCode::kInvalidEntry: return "InvalidEntry";
    case ErrorCode::kUnknownTable: return "UnknownTable";
    case ErrorCode::kUnknownMeter: return "UnknownMeter";
    case ErrorCode::kStateTableNotEmpty: return "StateTableNotEmpty";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kBadCommand: return "BadCommand";
    case ErrorCode::kBadLength: return "BadLength";
    case ErrorCode::kBadMessage: return "BadMessage";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace xfsm
