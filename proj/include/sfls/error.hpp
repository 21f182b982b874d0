// Copyright (c) 2026 the surfelsoup authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace sfls {

enum class ErrorCode {
  kInvalidArgument,
  kRange,
  kEmptyInput,
  kDegenerateNode,
  kDegenerateParameter,
  kParse,
  kIo,
  kTruncatedStream,
  kCorruptStream,
  kEmptySelection,
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace sfls
