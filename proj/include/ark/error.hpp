#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ark {

enum class ErrorKind {
  NotPSD,
  DegenerateData,
  SingularCovariance,
  InvalidArgument,
  InvalidNu,
  DimensionMismatch,
  MissingLatents,
  CdfRangeViolation,
  UnboundedMarginal,
  ZeroResponse,
  NoConvergence,
  DegenerateScore,
  DegenerateTau,
  AllReplicationsFailed,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library. `kind()` distinguishes failure
/// classes; `index()` carries the offending column or replication when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<long> index = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<long> index() const noexcept { return index_; }

  /// True for failures of the numerics (as opposed to bad inputs or config).
  bool is_numerical() const noexcept;

 private:
  ErrorKind kind_;
  std::optional<long> index_;
};

}  // namespace ark
