// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#include "sfls/error.hpp"

namespace sfls {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "invalid_argument";
    case ErrorCode::kRange:
      return "range";
    case ErrorCode::kEmptyInput:
      return "empty_input";
    case ErrorCode::kDegenerateNode:
      return "degenerate_node";
    case ErrorCode::kDegenerateParameter:
      return "degenerate_parameter";
    case ErrorCode::kParse:
      return "parse";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kTruncatedStream:
      return "truncated_stream";
    case ErrorCode::kCorruptStream:
      return "corrupt_stream";
    case ErrorCode::kEmptySelection:
      return "empty_selection";
    case ErrorCode::kInternal:
      return "internal";
  }
  return "unknown";
}

}  // namespace sfls
