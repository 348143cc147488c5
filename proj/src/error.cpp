#include "hcdg/error.hpp"

namespace hcdg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegreeTooLow: return "DegreeTooLow";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::TopologyError: return "TopologyError";
    case ErrorCode::TagError: return "TagError";
    case ErrorCode::PropagationConflict: return "PropagationConflict";
    case ErrorCode::AlternationViolated: return "AlternationViolated";
    case ErrorCode::MissingSwitch: return "MissingSwitch";
    case ErrorCode::NonDiagonalMass: return "NonDiagonalMass";
    case ErrorCode::SystemTooLarge: return "SystemTooLarge";
    case ErrorCode::SingularDependentBlock: return "SingularDependentBlock";
    case ErrorCode::PartitionNotBlockDiagonal: return "PartitionNotBlockDiagonal";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::UnstableRun: return "UnstableRun";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ReportTooShort: return "ReportTooShort";
    case ErrorCode::UnsupportedShape: return "UnsupportedShape";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace hcdg
