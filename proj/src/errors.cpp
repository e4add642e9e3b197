#include "ice/errors.hpp"

namespace ice {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::EmptyPrefix: return "EmptyPrefix";
    case ErrorKind::AllMissing: return "AllMissing";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::DegenerateSignal: return "DegenerateSignal";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::NonBinaryLabels: return "NonBinaryLabels";
    case ErrorKind::SingleGroup: return "SingleGroup";
    case ErrorKind::TooFewGroups: return "TooFewGroups";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace ice
