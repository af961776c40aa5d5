// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace phantomforge {

/// Stable error categories. The string forms are part of the CLI and HTTP
/// contracts and must not change.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kFormat,
  kValidation,
  kNotFound,
  kConflict,
  kInvalidState,
  kDimensionMismatch,
  kInsufficientData,
};

std::string_view to_string(ErrorCode code);

/// Process exit code used by the CLI for each category (always nonzero).
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace phantomforge
