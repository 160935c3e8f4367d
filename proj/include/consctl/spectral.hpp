#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace consctl {

using Complex = std::complex<double>;

/// One distinct eigenvalue of L.
struct EigenvalueInfo {
  Complex lambda;
  int alg_mult = 0;
  int geo_mult = 0;
  /// Largest distance from lambda to a computed eigenvalue in its cluster.
  double radius = 0.0;
  /// geo_mult x n; each row r satisfies r * L = lambda * r. Rows are
  /// orthonormal and the first non-negligible entry of each row is real
  /// positive.
  Eigen::MatrixXcd left_basis;
};

struct Spectrum {
  std::vector<EigenvalueInfo> eigs;  // sorted by (real, imag)
  double cluster_tol = 0.0;          // absolute tolerance actually used
  int n = 0;

  /// Distinct eigenvalue within cluster_tol of lambda, if any.
  const EigenvalueInfo* find(Complex lambda) const;
};

/// Default clustering tolerance: 1e-8 * (1 + max|lambda|).
double default_cluster_tol(double max_abs_eigenvalue);

/// Distinct eigenvalues with multiplicities and left eigenspaces.
///
/// Eigenvalues are computed per irreducible diagonal block of L (strongly
/// connected components of its off-diagonal pattern), so eigenvalues that
/// sit on a triangular part come out exact. They are then clustered by
/// cluster_tol (absolute; default_cluster_tol when unset). Nearby clusters
/// that are the numerical splitting of one defective eigenvalue are merged
/// when dim ker (L - mu I)^k reaches the merged size k and the members'
/// approximate eigenvectors are nearly parallel.
///
/// geo_mult = n - rank(L - lambda I). Throws Error(EigensolverFailure).
Spectrum eigen_decompose(const Eigen::MatrixXd& L,
                         std::optional<double> cluster_tol = std::nullopt);

/// Nonderogatory: every distinct eigenvalue has one Jordan block.
bool is_cyclic(const Spectrum& s);

/// Largest ||r L - lambda r|| over all left-basis rows.
double max_left_residual(const Spectrum& s, const Eigen::MatrixXd& L);

/// Residual bound a spectrum must meet: 1e3 * n * eps * max(1, ||L||_2).
double left_residual_bound(const Eigen::MatrixXd& L);

/// left_residual_bound(L) plus 10 times the largest cluster radius in s.
double left_residual_bound(const Eigen::MatrixXd& L, const Spectrum& s);

/// Singular values above the threshold. Auto threshold is
/// sigma_max * max(rows, cols) * eps.
int numerical_rank(const Eigen::MatrixXd& A, std::optional<double> tol = std::nullopt);
int numerical_rank(const Eigen::MatrixXcd& A, std::optional<double> tol = std::nullopt);

struct JordanStructure {
  std::vector<int> sizes;  // descending
  /// A singular value used in a rank decision sat within 10x of the cutoff.
  bool low_confidence = false;
};

/// Jordan block sizes of lambda from the Weyr sequence rank((L - lambda I)^k).
/// lambda is snapped to the nearest distinct eigenvalue; throws
/// Error(NotAnEigenvalue) if none lies within the clustering tolerance.
/// tol_rank is relative to ||L - lambda I||_2^k (default 1e-11).
JordanStructure jordan_block_sizes(const Eigen::MatrixXd& L, Complex lambda,
                                   std::optional<double> tol_rank = std::nullopt);

}  // namespace consctl
