#include "mfact/error.hpp"

#include <cstdio>
#include <utility>

namespace mfact {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveSemiDefinite: return "NotPositiveSemiDefinite";
    case ErrorCode::NotInDomainP: return "NotInDomainP";
    case ErrorCode::SingularInput: return "SingularInput";
    case ErrorCode::SingularR: return "SingularR";
    case ErrorCode::SingularL: return "SingularL";
    case ErrorCode::SingularD: return "SingularD";
    case ErrorCode::BaseMismatch: return "BaseMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConvergedOutsideChart: return "ConvergedOutsideChart";
    case ErrorCode::TooFarFromGroup: return "TooFarFromGroup";
    case ErrorCode::PathLeavesDomain: return "PathLeavesDomain";
  }
  return "Unknown";
}

ErrorClass error_class(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSymmetric:
    case ErrorCode::NotPositiveSemiDefinite:
    case ErrorCode::NotInDomainP:
    case ErrorCode::SingularInput:
    case ErrorCode::SingularR:
    case ErrorCode::SingularL:
    case ErrorCode::SingularD:
    case ErrorCode::PathLeavesDomain:
      return ErrorClass::Domain;
    case ErrorCode::NoConvergence:
    case ErrorCode::ConvergedOutsideChart:
    case ErrorCode::TooFarFromGroup:
      return ErrorClass::Numerical;
    default:
      return ErrorClass::Usage;
  }
}

Error::Error(ErrorCode code, std::string message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, std::string message, std::size_t index)
    : std::runtime_error(std::string(error_name(code)) + " k=" + std::to_string(index) + ": " +
                         message),
      code_(code),
      index_(index) {}

Error::Error(ErrorCode code, std::string what, std::optional<std::size_t> index,
             std::optional<double> parameter)
    : std::runtime_error(std::move(what)), code_(code), index_(index), parameter_(parameter) {}

Error Error::at_parameter(ErrorCode code, std::string message, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " t=%.17g: ", t);
  return Error(code, std::string(error_name(code)) + buf + message, std::nullopt, t);
}

}  // namespace mfact
