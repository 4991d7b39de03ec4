// Copyright 2026 The LayToken Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace laytoken {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI when reporting failures as JSON.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class ArgumentError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "argument"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }
  const char* kind() const noexcept override { return "io"; }

 private:
  std::string path_;
};

/// Malformed JSON input. `byte_offset` points at the offending byte.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return byte_offset_; }
  const char* kind() const noexcept override { return "parse"; }

 private:
  std::size_t byte_offset_;
};

/// Well-formed input that violates a document invariant. Indices are
/// zero-based; `segment` is -1 when the problem is page-level.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, long page, long segment)
      : Error(what), page_(page), segment_(segment) {}
  long page() const noexcept { return page_; }
  long segment() const noexcept { return segment_; }
  const char* kind() const noexcept override { return "validation"; }

 private:
  long page_;
  long segment_;
};

class ContextOverflowError : public Error {
 public:
  ContextOverflowError(std::size_t required, std::size_t available)
      : Error("sequence of " + std::to_string(required) +
              " tokens exceeds max_context " + std::to_string(available)),
        required_(required),
        available_(available) {}
  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }
  const char* kind() const noexcept override { return "context_overflow"; }

 private:
  std::size_t required_;
  std::size_t available_;
};

}  // namespace laytoken
