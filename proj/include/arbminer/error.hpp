#pragma once

#include <stdexcept>
#include <string>

namespace arbminer {

// Maps onto CLI exit codes: Usage=1, InputFormat=2, Numerical=3.
enum class ErrorKind { Usage = 1, InputFormat = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

private:
  ErrorKind kind_;
  std::string code_;
};

inline Error usage_error(std::string code, const std::string& message) {
  return Error(ErrorKind::Usage, std::move(code), message);
}
inline Error format_error(std::string code, const std::string& message) {
  return Error(ErrorKind::InputFormat, std::move(code), message);
}
inline Error numerical_error(std::string code, const std::string& message) {
  return Error(ErrorKind::Numerical, std::move(code), message);
}

} // namespace arbminer
