#pragma once

#include <stdexcept>
#include <string>

namespace psa {

enum class ErrorCode {
  invalid_argument,
  invalid_range,
  range_too_large,
  unknown_id,
  invalid_params,
  hypothesis_violation,
  max_subdivisions,
  overflow,
  io,
  callback_failed,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code; the C
// API maps it onto psa_status_t.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace psa
