#include "consctl/error.hpp"

namespace consctl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidGraph: return "InvalidGraph";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::UnreachableNodes: return "UnreachableNodes";
    case ErrorKind::NotATree: return "NotATree";
    case ErrorKind::EigensolverFailure: return "EigensolverFailure";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::SpectrumMismatch: return "SpectrumMismatch";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NoSpanningTree: return "NoSpanningTree";
    case ErrorKind::NoOffDiagonalEntry: return "NoOffDiagonalEntry";
    case ErrorKind::PlanMismatch: return "PlanMismatch";
    case ErrorKind::NotInDegreeRegular: return "NotInDegreeRegular";
    case ErrorKind::UnitWeightsRequired: return "UnitWeightsRequired";
    case ErrorKind::RepeatedEdgeWeights: return "RepeatedEdgeWeights";
    case ErrorKind::Overflow: return "Overflow";
  }
  return "Unknown";
}

}  // namespace consctl
