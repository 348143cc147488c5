#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hcdg {

enum class ErrorCode {
  DegreeTooLow,
  InvalidDomain,
  ParseError,
  TopologyError,
  TagError,
  PropagationConflict,
  AlternationViolated,
  MissingSwitch,
  NonDiagonalMass,
  SystemTooLarge,
  SingularDependentBlock,
  PartitionNotBlockDiagonal,
  SingularBlock,
  Diverged,
  UnstableRun,
  SingularSystem,
  ReportTooShort,
  UnsupportedShape,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception tagged with an ErrorCode.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hcdg
