#pragma once

#include <stdexcept>
#include <string>

namespace patlas {

enum class error_kind { validation, io };

/// Library error with a short machine-parsable code (e.g. "BAD_K",
/// "SIZE_MISMATCH") and a category used by the CLI to pick its exit code.
class error : public std::runtime_error {
 public:
  error(error_kind kind, std::string code, const std::string& message)
      : std::runtime_error(message), kind_(kind), code_(std::move(code)) {}

  error_kind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  error_kind kind_;
  std::string code_;
};

[[noreturn]] inline void fail_validation(const std::string& code, const std::string& message) {
  throw error(error_kind::validation, code, message);
}

[[noreturn]] inline void fail_io(const std::string& code, const std::string& message) {
  throw error(error_kind::io, code, message);
}

}  // namespace patlas
