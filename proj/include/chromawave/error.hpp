#pragma once

#include <stdexcept>
#include <string>

namespace chromawave {

enum class ErrorKind {
  invalid_argument,    // bad parameters (usage-level)
  degenerate_input,    // empty raster, empty mask, constant vector, ...
  dimension_mismatch,  // raster/bank or embedding sizes disagree
  format,              // malformed file contents
  io,                  // unreadable / unwritable path
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error raised while parsing a line-oriented file; carries the 1-based line.
class LineError : public Error {
 public:
  LineError(ErrorKind kind, std::size_t line, const std::string& what)
      : Error(kind, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace chromawave
