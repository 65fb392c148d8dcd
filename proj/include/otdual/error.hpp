#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otdual {

/// Failure categories shared by the C++ core, the C API and the CLI exit codes.
enum class ErrorCode {
  kSchema = 1,          ///< input does not match the expected structure
  kInconsistent = 2,    ///< well-formed but infeasible data (marginals, optimality)
  kNonConvergence = 3,  ///< iterative solver ran out of budget
  kInvalidArgument = 4, ///< bad index, dimension mismatch, out-of-domain parameter
  kNumericalRange = 5,  ///< overflow/underflow in floating point iterations
  kInternal = 6,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string check, const std::string& message)
      : std::runtime_error(message), code_(code), check_(std::move(check)) {}

  ErrorCode code() const noexcept { return code_; }
  /// Short identifier of the check that failed, e.g. "mu.sum".
  const std::string& check() const noexcept { return check_; }

 private:
  ErrorCode code_;
  std::string check_;
};

[[noreturn]] inline void fail(ErrorCode code, std::string check, const std::string& message) {
  throw Error(code, std::move(check), message);
}

}  // namespace otdual
