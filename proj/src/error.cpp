#include "paqs/error.hpp"

namespace paqs {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Domain: return "domain_error";
    case ErrorKind::Format: return "format_error";
    case ErrorKind::Io: return "io_error";
    case ErrorKind::Numerical: return "numerical_error";
    case ErrorKind::Limit: return "limit_exceeded";
    case ErrorKind::Budget: return "budget_exceeded";
  }
  return "unknown";
}

namespace {
std::string locate(const std::string& file, std::size_t row, std::size_t column, const std::string& message) {
  std::string out = file.empty() ? std::string("<input>") : file;
  if (row > 0) out += ":" + std::to_string(row);
  if (column > 0) out += ":" + std::to_string(column);
  return out + ": " + message;
}
}  // namespace

FormatError::FormatError(std::string file, std::size_t row, std::size_t column, const std::string& message)
    : Error(ErrorKind::Format, locate(file, row, column, message)),
      file_(std::move(file)),
      row_(row),
      column_(column) {}

}  // namespace paqs
