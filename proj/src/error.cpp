// Copyright 2026 The PhantomForge Authors
// SPDX-License-Identifier: Apache-2.0

#include "phantomforge/error.hpp"

namespace phantomforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kInvalidState: return "invalid_state";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kInsufficientData: return "insufficient_data";
  }
  return "unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return 2;
    case ErrorCode::kIo: return 3;
    case ErrorCode::kFormat: return 4;
    case ErrorCode::kValidation: return 5;
    case ErrorCode::kNotFound: return 6;
    case ErrorCode::kConflict: return 7;
    case ErrorCode::kInvalidState: return 8;
    case ErrorCode::kDimensionMismatch: return 9;
    case ErrorCode::kInsufficientData: return 10;
  }
  return 1;
}

}  // namespace phantomforge
