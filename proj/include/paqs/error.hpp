#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paqs {

/// Error categories shared by the C API status codes, the CLI exit codes
/// and the gateway's machine-readable error field.
enum class ErrorKind {
  InvalidArgument,  // caller violated a precondition (bad label, empty set...)
  Domain,           // physically or mathematically inadmissible input
  Format,           // malformed file or string
  Io,               // file could not be opened/written
  Numerical,        // contract violation detected numerically (unitarity...)
  Limit,            // size guard exceeded
  Budget,           // time budget exceeded
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Malformed input file.  Row and column are 1-based; 0 means "not applicable".
class FormatError : public Error {
 public:
  FormatError(std::string file, std::size_t row, std::size_t column, const std::string& message);

  const std::string& file() const noexcept { return file_; }
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string file_;
  std::size_t row_;
  std::size_t column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace paqs
