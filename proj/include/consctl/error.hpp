#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace consctl {

enum class ErrorKind {
  InvalidArgument,
  InvalidGraph,
  Parse,
  UnreachableNodes,
  NotATree,
  EigensolverFailure,
  NotAnEigenvalue,
  SpectrumMismatch,
  BudgetExceeded,
  NoSpanningTree,
  NoOffDiagonalEntry,
  PlanMismatch,
  NotInDegreeRegular,
  UnitWeightsRequired,
  RepeatedEdgeWeights,
  Overflow,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace consctl
