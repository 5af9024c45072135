#include "ark/error.hpp"

namespace ark {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidNu: return "InvalidNu";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingLatents: return "MissingLatents";
    case ErrorKind::CdfRangeViolation: return "CdfRangeViolation";
    case ErrorKind::UnboundedMarginal: return "UnboundedMarginal";
    case ErrorKind::ZeroResponse: return "ZeroResponse";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateScore: return "DegenerateScore";
    case ErrorKind::DegenerateTau: return "DegenerateTau";
    case ErrorKind::AllReplicationsFailed: return "AllReplicationsFailed";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<long> index)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message +
                         (index ? " (index " + std::to_string(*index) + ")" : "")),
      kind_(kind),
      index_(index) {}

bool Error::is_numerical() const noexcept {
  switch (kind_) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidNu:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ConfigError:
    case ErrorKind::UnboundedMarginal:
      return false;
    default:
      return true;
  }
}

}  // namespace ark
