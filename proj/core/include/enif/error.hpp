#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace enif {

/// Failure categories surfaced by the library. Every throw site carries one.
enum class ErrorCode {
  not_positive_definite,
  dimension_mismatch,
  invalid_argument,
  order_too_large,
  too_few_states,
  non_stationary,
  unstable_step,
  non_finite,
  grid_too_large_for_oracle,
  degenerate_element,
  underdetermined_row,
  zero_residual,
  underdetermined,
  weights_not_normalised,
  singular_innovation_covariance,
  parse_error,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerical kind (as opposed to bad input files or arguments).
  bool is_numerical() const noexcept;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace enif
