#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "consctl/graph.hpp"
#include "consctl/spectral.hpp"
#include "consctl/tolerances.hpp"

namespace consctl {

/// Agents that receive external input, kept sorted ascending.
class LeaderSet {
 public:
  /// Throws Error(InvalidArgument) if empty, out of range or duplicated.
  LeaderSet(std::vector<NodeId> agents, int n);

  std::span<const NodeId> agents() const noexcept { return agents_; }
  int size() const noexcept { return static_cast<int>(agents_.size()); }
  int node_count() const noexcept { return n_; }
  bool contains(NodeId v) const;

  friend bool operator==(const LeaderSet&, const LeaderSet&) = default;
  friend auto operator<=>(const LeaderSet& a, const LeaderSet& b) {
    return a.agents_ <=> b.agents_;
  }

 private:
  std::vector<NodeId> agents_;
  int n_ = 0;
};

enum class VerdictMethod { Kalman, Pbh, Both };
std::string_view to_string(VerdictMethod m);

struct ControllabilityVerdict {
  bool controllable = false;
  /// Kalman: dimension of the controllable subspace. PBH: n minus the summed
  /// eigenspace deficits (an upper bound on the Kalman rank).
  int rank = 0;
  VerdictMethod method = VerdictMethod::Kalman;
  double tolerance = 0.0;
};

/// B = (e_{i1}, ..., e_{im}).
Eigen::MatrixXd input_matrix(const LeaderSet& leaders, int n);

/// (B, LB, ..., L^{n-1} B). Rank is unchanged under L -> -L.
Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B);

/// Orthonormal basis of the Krylov space spanned by the columns of the
/// controllability matrix, built one direction at a time with re-orthogonalized
/// Gram-Schmidt. Same column space as controllability_matrix(L, B) but with
/// no powers of L formed explicitly.
Eigen::MatrixXd controllable_basis(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B,
                                   double rel_tol);

ControllabilityVerdict kalman_verdict(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B,
                                      const Tolerances& tol = {});

/// Controllable iff rank(W_lambda B) = geo_mult(lambda) for every distinct
/// eigenvalue, W_lambda the left eigenspace basis. Throws
/// Error(SpectrumMismatch) if the spectrum does not belong to L.
ControllabilityVerdict pbh_verdict(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B,
                                   const Spectrum& spectrum, const Tolerances& tol = {});

/// Agents that control the system alone: empty when L is derogatory,
/// otherwise agents whose entry is nonzero in every left eigenvector, each
/// confirmed by the Kalman test.
std::vector<NodeId> slc_candidates(const Eigen::MatrixXd& L, const Spectrum& spectrum,
                                   const Tolerances& tol = {});
bool is_slc(const Eigen::MatrixXd& L, const Spectrum& spectrum, const Tolerances& tol = {});

/// Left eigenspace basis of lambda restricted to the leader columns
/// (geo_mult x m). Throws Error(NotAnEigenvalue).
Eigen::MatrixXcd omega_matrix(const Spectrum& spectrum, const LeaderSet& leaders,
                              Complex lambda);

/// rank(Omega_lambda) = geo_mult(lambda) for every distinct eigenvalue.
bool r_leader_test(const Eigen::MatrixXd& L, const Spectrum& spectrum,
                   const LeaderSet& leaders, const Tolerances& tol = {});

struct LeaderBounds {
  int lower = 0;  // max geo_mult
  int upper = 0;  // sum of geo_mult
};
LeaderBounds min_leader_bounds(const Spectrum& spectrum);

struct LeaderSearchOptions {
  std::optional<int> max_cardinality;
  std::vector<NodeId> required_agents;
  bool enumerate_all = true;
  std::uint64_t budget = 2'000'000;  // candidate sets, summed over levels
};

struct LeaderSearchResult {
  std::vector<LeaderSet> sets;  // lexicographic order; empty if none found
  int cardinality = 0;          // 0 when sets is empty
  std::uint64_t candidates_tested = 0;
};

/// Exhaustive search by increasing cardinality, starting from the larger of
/// the eigenspace lower bound and the number of required agents. Throws
/// Error(BudgetExceeded) before a level that would push the candidate count
/// past options.budget.
LeaderSearchResult minimal_leader_sets(const Eigen::MatrixXd& L, const Spectrum& spectrum,
                                       const LeaderSearchOptions& options = {},
                                       const Tolerances& tol = {});

}  // namespace consctl
