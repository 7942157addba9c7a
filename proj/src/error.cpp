#include "bsemitoric/error.hpp"

namespace bsemitoric {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfOverlap: return "OutOfOverlap";
    case ErrorKind::ChartDomain: return "ChartDomain";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::OnSingularHypersurface: return "OnSingularHypersurface";
    case ErrorKind::NotFixedPoint: return "NotFixedPoint";
    case ErrorKind::NoAdmissiblePencil: return "NoAdmissiblePencil";
    case ErrorKind::UnrecognizedPattern: return "UnrecognizedPattern";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace bsemitoric
