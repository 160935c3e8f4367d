#include "consctl/leader_select.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <string>

#include "consctl/error.hpp"

namespace consctl {

namespace {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r = r * num / static_cast<std::uint64_t>(i);
  }
  return r;
}

// Advances idx to the next k-combination of 0..n-1; false after the last.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

bool omega_full_rank(const Eigen::MatrixXcd& omega, int geo_mult, double zero_tol) {
  if (omega.cols() < geo_mult) return false;
  if (geo_mult == 1) return omega.cwiseAbs().maxCoeff() > zero_tol;
  return numerical_rank(omega, zero_tol) == geo_mult;
}

void require_spectrum_of(const Eigen::MatrixXd& L, const Spectrum& s) {
  if (s.n != L.rows()) {
    throw Error(ErrorKind::SpectrumMismatch,
                "spectrum has size " + std::to_string(s.n) + ", matrix has " +
                    std::to_string(L.rows()));
  }
  const double residual = max_left_residual(s, L);
  const double bound = left_residual_bound(L, s);
  if (!(residual <= bound)) {
    throw Error(ErrorKind::SpectrumMismatch,
                "left eigenvector residual " + std::to_string(residual) +
                    " exceeds " + std::to_string(bound));
  }
}

}  // namespace

LeaderSet::LeaderSet(std::vector<NodeId> agents, int n) : agents_(std::move(agents)), n_(n) {
  if (agents_.empty()) throw Error(ErrorKind::InvalidArgument, "leader set is empty");
  std::sort(agents_.begin(), agents_.end());
  for (std::size_t k = 0; k < agents_.size(); ++k) {
    if (agents_[k] < 0 || agents_[k] >= n) {
      throw Error(ErrorKind::InvalidArgument,
                  "leader " + std::to_string(agents_[k] + 1) + " outside 1.." +
                      std::to_string(n));
    }
    if (k > 0 && agents_[k] == agents_[k - 1]) {
      throw Error(ErrorKind::InvalidArgument,
                  "leader " + std::to_string(agents_[k] + 1) + " listed twice");
    }
  }
}

bool LeaderSet::contains(NodeId v) const {
  return std::binary_search(agents_.begin(), agents_.end(), v);
}

std::string_view to_string(VerdictMethod m) {
  switch (m) {
    case VerdictMethod::Kalman: return "kalman";
    case VerdictMethod::Pbh: return "pbh";
    case VerdictMethod::Both: return "both";
  }
  return "unknown";
}

Eigen::MatrixXd input_matrix(const LeaderSet& leaders, int n) {
  if (leaders.node_count() != n) {
    throw Error(ErrorKind::InvalidArgument, "leader set built for a different node count");
  }
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, leaders.size());
  for (int k = 0; k < leaders.size(); ++k) B(leaders.agents()[k], k) = 1.0;
  return B;
}

Eigen::MatrixXd controllability_matrix(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B) {
  const Eigen::Index n = L.rows();
  const Eigen::Index m = B.cols();
  if (L.cols() != n || B.rows() != n) {
    throw Error(ErrorKind::InvalidArgument, "controllability_matrix: shapes not conformal");
  }
  Eigen::MatrixXd C(n, n * m);
  if (n == 0 || m == 0) return C;
  C.leftCols(m) = B;
  for (Eigen::Index k = 1; k < n; ++k) {
    C.middleCols(k * m, m) = L * C.middleCols((k - 1) * m, m);
  }
  return C;
}

Eigen::MatrixXd controllable_basis(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B,
                                   double rel_tol) {
  const Eigen::Index n = L.rows();
  if (L.cols() != n || B.rows() != n) {
    throw Error(ErrorKind::InvalidArgument, "controllable_basis: shapes not conformal");
  }
  const double cutoff = rel_tol * std::max(1.0, L.norm());
  Eigen::MatrixXd Q(n, n);
  Eigen::Index dim = 0;
  std::deque<Eigen::VectorXd> pending;
  for (Eigen::Index c = 0; c < B.cols(); ++c) pending.push_back(B.col(c));

  while (!pending.empty() && dim < n) {
    Eigen::VectorXd r = std::move(pending.front());
    pending.pop_front();
    for (int pass = 0; pass < 2; ++pass) {
      r -= Q.leftCols(dim) * (Q.leftCols(dim).transpose() * r);
    }
    const double norm = r.norm();
    if (norm > cutoff) {
      Q.col(dim) = r / norm;
      pending.push_back(L * Q.col(dim));
      ++dim;
    }
  }
  return Q.leftCols(dim);
}

ControllabilityVerdict kalman_verdict(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B,
                                      const Tolerances& tol) {
  ControllabilityVerdict v;
  v.method = VerdictMethod::Kalman;
  v.tolerance = tol.rank;
  v.rank = static_cast<int>(controllable_basis(L, B, tol.rank).cols());
  v.controllable = v.rank == L.rows();
  return v;
}

ControllabilityVerdict pbh_verdict(const Eigen::MatrixXd& L, const Eigen::MatrixXd& B,
                                   const Spectrum& spectrum, const Tolerances& tol) {
  require_spectrum_of(L, spectrum);
  if (B.rows() != L.rows()) {
    throw Error(ErrorKind::InvalidArgument, "pbh_verdict: shapes not conformal");
  }
  ControllabilityVerdict v;
  v.method = VerdictMethod::Pbh;
  v.tolerance = tol.zero;
  const Eigen::MatrixXcd Bc = B.cast<Complex>();
  int deficit = 0;
  for (const auto& e : spectrum.eigs) {
    const Eigen::MatrixXcd omega = e.left_basis * Bc;
    const int r = omega.cols() == 0 ? 0 : numerical_rank(omega, tol.zero);
    deficit += e.geo_mult - std::min(r, e.geo_mult);
  }
  v.rank = static_cast<int>(L.rows()) - deficit;
  v.controllable = deficit == 0;
  return v;
}

std::vector<NodeId> slc_candidates(const Eigen::MatrixXd& L, const Spectrum& spectrum,
                                   const Tolerances& tol) {
  require_spectrum_of(L, spectrum);
  std::vector<NodeId> out;
  if (!is_cyclic(spectrum)) return out;
  const int n = static_cast<int>(L.rows());
  for (NodeId i = 0; i < n; ++i) {
    const bool all_nonzero =
        std::all_of(spectrum.eigs.begin(), spectrum.eigs.end(), [&](const auto& e) {
          return std::abs(e.left_basis(0, i)) > tol.zero;
        });
    if (!all_nonzero) continue;
    if (kalman_verdict(L, Eigen::VectorXd::Unit(n, i), tol).controllable) out.push_back(i);
  }
  return out;
}

bool is_slc(const Eigen::MatrixXd& L, const Spectrum& spectrum, const Tolerances& tol) {
  return !slc_candidates(L, spectrum, tol).empty();
}

Eigen::MatrixXcd omega_matrix(const Spectrum& spectrum, const LeaderSet& leaders,
                              Complex lambda) {
  const EigenvalueInfo* e = spectrum.find(lambda);
  if (!e) {
    throw Error(ErrorKind::NotAnEigenvalue,
                "(" + std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) +
                    ") is not an eigenvalue");
  }
  Eigen::MatrixXcd omega(e->geo_mult, leaders.size());
  for (int k = 0; k < leaders.size(); ++k) {
    omega.col(k) = e->left_basis.col(leaders.agents()[k]);
  }
  return omega;
}

bool r_leader_test(const Eigen::MatrixXd& L, const Spectrum& spectrum,
                   const LeaderSet& leaders, const Tolerances& tol) {
  if (spectrum.n != L.rows() || leaders.node_count() != L.rows()) {
    throw Error(ErrorKind::SpectrumMismatch, "r_leader_test: size mismatch");
  }
  return std::all_of(spectrum.eigs.begin(), spectrum.eigs.end(), [&](const auto& e) {
    return omega_full_rank(omega_matrix(spectrum, leaders, e.lambda), e.geo_mult, tol.zero);
  });
}

LeaderBounds min_leader_bounds(const Spectrum& spectrum) {
  LeaderBounds b;
  for (const auto& e : spectrum.eigs) {
    b.lower = std::max(b.lower, e.geo_mult);
    b.upper += e.geo_mult;
  }
  return b;
}

LeaderSearchResult minimal_leader_sets(const Eigen::MatrixXd& L, const Spectrum& spectrum,
                                       const LeaderSearchOptions& options,
                                       const Tolerances& tol) {
  require_spectrum_of(L, spectrum);
  const int n = static_cast<int>(L.rows());

  std::vector<NodeId> required = options.required_agents;
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());
  for (NodeId r : required) {
    if (r < 0 || r >= n) {
      throw Error(ErrorKind::InvalidArgument,
                  "required agent " + std::to_string(r + 1) + " outside 1.." + std::to_string(n));
    }
  }
  std::vector<NodeId> free_agents;
  for (NodeId v = 0; v < n; ++v) {
    if (!std::binary_search(required.begin(), required.end(), v)) free_agents.push_back(v);
  }
  const int fixed = static_cast<int>(required.size());
  const int nfree = static_cast<int>(free_agents.size());

  const LeaderBounds bounds = min_leader_bounds(spectrum);
  const int first = std::max({bounds.lower, fixed, 1});
  const int last = std::min(options.max_cardinality.value_or(n), n);

  LeaderSearchResult result;
  std::uint64_t planned = 0;
  for (int k = first; k <= last; ++k) {
    const int extra = k - fixed;
    const std::uint64_t level = binomial(nfree, extra);
    if (level == 0) continue;
    if (level > options.budget || planned > options.budget - level) {
      throw Error(ErrorKind::BudgetExceeded,
                  "leader search would test more than " + std::to_string(options.budget) +
                      " candidate sets (cardinality " + std::to_string(k) + ")");
    }
    planned += level;

    std::vector<int> idx(extra);
    for (int j = 0; j < extra; ++j) idx[j] = j;
    do {
      std::vector<NodeId> agents = required;
      for (int j : idx) agents.push_back(free_agents[j]);
      LeaderSet candidate(std::move(agents), n);
      ++result.candidates_tested;
      if (r_leader_test(L, spectrum, candidate, tol)) {
        result.sets.push_back(std::move(candidate));
        if (!options.enumerate_all) break;
      }
    } while (next_combination(idx, nfree));

    if (!result.sets.empty()) {
      result.cardinality = k;
      return result;
    }
  }
  return result;
}

}  // namespace consctl
