#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mfact {

enum class ErrorCode {
  InvalidArgument,
  ShapeError,
  ParseError,
  NotSymmetric,
  NotPositiveSemiDefinite,
  NotInDomainP,
  SingularInput,
  SingularR,
  SingularL,
  SingularD,
  BaseMismatch,
  NoConvergence,
  ConvergedOutsideChart,
  TooFarFromGroup,
  PathLeavesDomain,
};

/// Stable name used in messages and by the CLI ("NotInDomainP", ...).
std::string_view error_name(ErrorCode code) noexcept;

/// Broad grouping used to pick process exit codes.
enum class ErrorClass {
  Usage,      // bad input shape, parse failures, bad arguments
  Domain,     // the input lies outside the map's domain
  Numerical,  // iteration failed to converge or left its chart
};

ErrorClass error_class(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code, plus the 1-based pivot index
/// or the path parameter where the failure was detected, when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message);
  Error(ErrorCode code, std::string message, std::size_t index);

  static Error at_parameter(ErrorCode code, std::string message, double t);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }
  std::optional<double> parameter() const noexcept { return parameter_; }

 private:
  Error(ErrorCode code, std::string what, std::optional<std::size_t> index,
        std::optional<double> parameter);

  ErrorCode code_;
  std::optional<std::size_t> index_;
  std::optional<double> parameter_;
};

}  // namespace mfact
