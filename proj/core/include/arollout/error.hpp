// Copyright 2026 The arollout Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace arollout {

// Raised when a caller hands us something that violates a documented
// precondition: bad shapes, out-of-range hyperparameters, malformed input
// files. The CLI maps this family to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A persisted file could not be decoded (bad magic, truncation, corrupt
// header).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The file is well-formed but was written by a newer format revision.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arollout
