// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lingeval {

enum class ErrorCode {
  MalformedRecord,
  DuplicateId,
  EmptyCorpus,
  MissingExemplars,
  MissingOracleLabel,
  EmptyGeneration,
  RegimeMismatch,
  AuthError,
  ExhaustedRetries,
  ProtocolError,
  CorruptCacheEntry,
  EmptyReference,
  ShapeMismatch,
  UnknownRun,
  ConfigError,
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::MissingExemplars: return "MissingExemplars";
    case ErrorCode::MissingOracleLabel: return "MissingOracleLabel";
    case ErrorCode::EmptyGeneration: return "EmptyGeneration";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::ExhaustedRetries: return "ExhaustedRetries";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::CorruptCacheEntry: return "CorruptCacheEntry";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::UnknownRun: return "UnknownRun";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure the library reports is an Error carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace lingeval
