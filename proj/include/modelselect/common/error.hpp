// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modelselect {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

/// A file or record could not be parsed. Carries the file name and 1-based line.
class ParseError : public Error {
  public:
    ParseError(std::string file, std::size_t line, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": " + message), file_(std::move(file)), line_(line)
    {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

/// Network-level failure (connection refused, timeout, replay miss).
class TransportError : public Error {
  public:
    using Error::Error;
};

/// The remote answered, but not in the shape we expect.
class ProtocolError : public Error {
  public:
    using Error::Error;
};

}  // namespace modelselect
