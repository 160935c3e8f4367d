#pragma once

#include <optional>

namespace consctl {

/// Numerical cutoffs shared by the analyses. Reports echo these values.
struct Tolerances {
  /// Absolute eigenvalue clustering tolerance; unset means
  /// 1e-8 * (1 + max|lambda|).
  std::optional<double> cluster;
  /// Krylov deflation cutoff relative to max(1, ||L||_F). A new direction
  /// whose orthogonal residual is below it adds no rank.
  double rank = 1e-9;
  /// An entry of a unit left eigenvector (or a singular value of an
  /// Omega matrix) counts as nonzero above this.
  double zero = 1e-7;
};

}  // namespace consctl
