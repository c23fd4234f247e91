#pragma once

#include <stdexcept>
#include <string>

namespace radreact {

enum class ErrorCode {
  normalization,
  non_finite,
  insufficient_samples,
  not_timelike,
  domain_breach,
  not_monotone,
  degenerate_regime,
  no_convergence,
  maximal_accel_breach,
  regime_violation,
  runaway_abort,
  nonrelativistic_limit,
  config,
  io,
  invalid_argument,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// the C API and the CLI can map it to a status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace radreact
