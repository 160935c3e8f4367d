#include "consctl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "consctl/error.hpp"
#include "consctl/graph.hpp"

namespace consctl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Relative cutoff for rank(L - lambda I) when counting eigenvectors.
constexpr double kEigenspaceRankTol = 1e-9;
// Relative cutoff for rank((L - mu I)^k) when validating a defective merge.
constexpr double kPowerRankTol = 1e-11;
// Clusters further apart than this (relative to 1 + max|lambda|) are never
// treated as one defective eigenvalue.
constexpr double kMaxDefectiveSpread = 1e-3;
// A k-fold defective eigenvalue splits by about eps^(1/k) * ||L||; merged
// members must lie within this multiple of that radius from their mean.
constexpr double kDefectiveSplitFactor = 10.0;
// Approximate eigenvectors of a split defective eigenvalue are nearly
// parallel: sigma_min of the normalized set is about eps^((k-1)/k).
constexpr double kParallelTol = 1e-5;
// Residual allowance per unit of cluster radius.
constexpr double kClusterResidualFactor = 10.0;

template <typename Matrix>
Eigen::VectorXd singular_values(const Matrix& A) {
  if (A.size() == 0) return Eigen::VectorXd();
  return Eigen::BDCSVD<Matrix>(A).singularValues();
}

double norm2(const Eigen::MatrixXd& A) {
  Eigen::VectorXd sv = singular_values(A);
  return sv.size() ? sv(0) : 0.0;
}

template <typename Matrix>
int rank_impl(const Matrix& A, std::optional<double> tol) {
  Eigen::VectorXd sv = singular_values(A);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double thr =
      tol ? *tol : sv(0) * static_cast<double>(std::max(A.rows(), A.cols())) * kEps;
  return static_cast<int>((sv.array() > thr).count());
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Eigenvalues of each irreducible diagonal block of L.
std::vector<Complex> block_eigenvalues(const Eigen::MatrixXd& L) {
  const int n = static_cast<int>(L.rows());
  std::vector<Edge> pattern;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && L(i, j) != 0.0) pattern.push_back({j, i, 1.0});
    }
  }
  Condensation blocks = condense(DirectedGraph(n, std::move(pattern)));

  std::vector<Complex> values;
  values.reserve(n);
  for (const auto& idx : blocks.components) {
    const int m = static_cast<int>(idx.size());
    if (m == 1) {
      values.emplace_back(L(idx[0], idx[0]), 0.0);
      continue;
    }
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sub(a, b) = L(idx[a], idx[b]);
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(sub, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::EigensolverFailure,
                  "eigenvalue iteration did not converge on a block of size " +
                      std::to_string(m));
    }
    for (int a = 0; a < m; ++a) values.push_back(es.eigenvalues()(a));
  }
  return values;
}

Eigen::MatrixXcd shifted(const Eigen::MatrixXd& L, Complex mu) {
  Eigen::MatrixXcd M = L.cast<Complex>();
  M.diagonal().array() -= mu;
  return M;
}

// n - rank((L - mu I)^k) with a cutoff relative to ||L - mu I||^k.
int power_nullity(const Eigen::MatrixXd& L, Complex mu, int k, double rel_tol,
                  bool* ambiguous) {
  const Eigen::MatrixXcd M = shifted(L, mu);
  const double scale = std::max(1.0, singular_values(M)(0));
  Eigen::MatrixXcd P = M;
  for (int p = 1; p < k; ++p) P = P * M;
  Eigen::VectorXd sv = singular_values(P);
  const double thr = rel_tol * std::pow(scale, k);
  if (ambiguous) {
    for (double s : sv) {
      if (s > thr / 10.0 && s < thr * 10.0) *ambiguous = true;
    }
  }
  return static_cast<int>((sv.array() <= thr).count());
}

// Smallest singular value of the unit right singular vectors of
// L - lambda_i I, one per member.
double eigenvector_spread(const Eigen::MatrixXd& L, const std::vector<int>& members,
                          const std::vector<Complex>& vals) {
  const Eigen::Index n = L.rows();
  Eigen::MatrixXcd V(n, static_cast<Eigen::Index>(members.size()));
  for (std::size_t c = 0; c < members.size(); ++c) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted(L, vals[members[c]]), Eigen::ComputeFullV);
    V.col(static_cast<Eigen::Index>(c)) = svd.matrixV().col(n - 1);
  }
  const Eigen::VectorXd sv = singular_values(V);
  return sv(sv.size() - 1);
}

Complex mean_of(const std::vector<int>& members, const std::vector<Complex>& vals) {
  Complex sum = 0.0;
  for (int i : members) sum += vals[i];
  return sum / static_cast<double>(members.size());
}

std::vector<std::vector<int>> cluster(const Eigen::MatrixXd& L,
                                      const std::vector<Complex>& vals, double tol,
                                      double scale) {
  const int n = static_cast<int>(vals.size());
  DisjointSets base(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(vals[i] - vals[j]) <= tol) base.unite(i, j);
    }
  }
  std::vector<std::vector<int>> groups;
  {
    std::vector<int> slot(n, -1);
    for (int i = 0; i < n; ++i) {
      int r = base.find(i);
      if (slot[r] < 0) {
        slot[r] = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      groups[slot[r]].push_back(i);
    }
  }

  const double max_radius = kMaxDefectiveSpread * scale;
  const double norm = L.size() == 0 ? 0.0 : singular_values(L)(0);
  for (double radius = tol * 10.0; radius <= max_radius; radius *= 10.0) {
    const int g = static_cast<int>(groups.size());
    DisjointSets link(g);
    for (int a = 0; a < g; ++a) {
      for (int b = a + 1; b < g; ++b) {
        for (int i : groups[a]) {
          for (int j : groups[b]) {
            if (std::abs(vals[i] - vals[j]) <= radius) link.unite(a, b);
          }
        }
      }
    }
    std::vector<std::vector<int>> supers(g);
    for (int a = 0; a < g; ++a) supers[link.find(a)].push_back(a);

    std::vector<std::vector<int>> next;
    for (const auto& parts : supers) {
      if (parts.empty()) continue;
      if (parts.size() == 1) {
        next.push_back(groups[parts[0]]);
        continue;
      }
      std::vector<int> merged;
      for (int a : parts) merged.insert(merged.end(), groups[a].begin(), groups[a].end());
      const int k = static_cast<int>(merged.size());
      const Complex mu = mean_of(merged, vals);
      double spread = 0.0;
      for (int i : merged) spread = std::max(spread, std::abs(vals[i] - mu));
      const double split = kDefectiveSplitFactor * std::pow(kEps, 1.0 / k) * norm;
      if (spread <= split && power_nullity(L, mu, k, kPowerRankTol, nullptr) == k &&
          eigenvector_spread(L, merged, vals) <= kParallelTol) {
        std::sort(merged.begin(), merged.end());
        next.push_back(std::move(merged));
      } else {
        for (int a : parts) next.push_back(groups[a]);
      }
    }
    groups = std::move(next);
  }
  return groups;
}

void normalize_phase(Eigen::RowVectorXcd& row) {
  const double norm = row.norm();
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double mag = std::abs(row(j));
    if (mag > 1e-8 * norm) {
      row *= std::conj(row(j)) / mag;
      row(j) = Complex(mag, 0.0);
      return;
    }
  }
}

}  // namespace

const EigenvalueInfo* Spectrum::find(Complex lambda) const {
  const EigenvalueInfo* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& e : eigs) {
    const double d = std::abs(e.lambda - lambda);
    if (d < best_dist) {
      best_dist = d;
      best = &e;
    }
  }
  return best_dist <= cluster_tol ? best : nullptr;
}

double default_cluster_tol(double max_abs_eigenvalue) {
  return 1e-8 * (1.0 + max_abs_eigenvalue);
}

Spectrum eigen_decompose(const Eigen::MatrixXd& L, std::optional<double> cluster_tol) {
  if (L.rows() != L.cols() || L.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "eigen_decompose needs a nonempty square matrix");
  }
  if (!L.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  }
  const int n = static_cast<int>(L.rows());
  const std::vector<Complex> vals = block_eigenvalues(L);

  double max_abs = 0.0;
  for (Complex v : vals) max_abs = std::max(max_abs, std::abs(v));
  const double scale = 1.0 + max_abs;

  Spectrum s;
  s.n = n;
  s.cluster_tol = cluster_tol ? *cluster_tol : default_cluster_tol(max_abs);

  const double rank_cut = kEigenspaceRankTol * std::max(1.0, norm2(L));
  for (const auto& members : cluster(L, vals, s.cluster_tol, scale)) {
    EigenvalueInfo info;
    info.lambda = members.size() == 1 ? vals[members[0]] : mean_of(members, vals);
    if (members.size() > 1 && std::abs(info.lambda.imag()) <= s.cluster_tol) {
      info.lambda = Complex(info.lambda.real(), 0.0);
    }
    info.alg_mult = static_cast<int>(members.size());
    for (int i : members) info.radius = std::max(info.radius, std::abs(vals[i] - info.lambda));

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(shifted(L, info.lambda), Eigen::ComputeFullU);
    const Eigen::VectorXd& sv = svd.singularValues();
    int nullity = static_cast<int>((sv.array() <= rank_cut).count());
    info.geo_mult = std::clamp(nullity, 1, info.alg_mult);

    info.left_basis.resize(info.geo_mult, n);
    for (int t = 0; t < info.geo_mult; ++t) {
      Eigen::RowVectorXcd row = svd.matrixU().col(n - info.geo_mult + t).adjoint();
      normalize_phase(row);
      info.left_basis.row(t) = row;
    }
    s.eigs.push_back(std::move(info));
  }

  std::sort(s.eigs.begin(), s.eigs.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return s;
}

bool is_cyclic(const Spectrum& s) {
  return std::all_of(s.eigs.begin(), s.eigs.end(),
                     [](const EigenvalueInfo& e) { return e.geo_mult == 1; });
}

double max_left_residual(const Spectrum& s, const Eigen::MatrixXd& L) {
  double worst = 0.0;
  const Eigen::MatrixXcd Lc = L.cast<Complex>();
  for (const auto& e : s.eigs) {
    for (Eigen::Index r = 0; r < e.left_basis.rows(); ++r) {
      Eigen::RowVectorXcd row = e.left_basis.row(r);
      worst = std::max(worst, (row * Lc - e.lambda * row).norm());
    }
  }
  return worst;
}

double left_residual_bound(const Eigen::MatrixXd& L) {
  return 1e3 * static_cast<double>(L.rows()) * kEps * std::max(1.0, norm2(L));
}

double left_residual_bound(const Eigen::MatrixXd& L, const Spectrum& s) {
  double radius = 0.0;
  for (const auto& e : s.eigs) radius = std::max(radius, e.radius);
  return left_residual_bound(L) + kClusterResidualFactor * radius;
}

int numerical_rank(const Eigen::MatrixXd& A, std::optional<double> tol) {
  return rank_impl(A, tol);
}

int numerical_rank(const Eigen::MatrixXcd& A, std::optional<double> tol) {
  return rank_impl(A, tol);
}

JordanStructure jordan_block_sizes(const Eigen::MatrixXd& L, Complex lambda,
                                   std::optional<double> tol_rank) {
  const Spectrum s = eigen_decompose(L);
  const EigenvalueInfo* e = s.find(lambda);
  if (!e) {
    throw Error(ErrorKind::NotAnEigenvalue,
                "no eigenvalue within " + std::to_string(s.cluster_tol) + " of (" +
                    std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) +
                    ")");
  }
  const double rel = tol_rank.value_or(kPowerRankTol);
  JordanStructure out;
  // nullity[k] = dim ker (L - lambda I)^k
  std::vector<int> nullity{0};
  for (int k = 1; k <= e->alg_mult; ++k) {
    nullity.push_back(
        std::min(power_nullity(L, e->lambda, k, rel, &out.low_confidence), e->alg_mult));
    if (nullity[k] == e->alg_mult || nullity[k] == nullity[k - 1]) break;
  }
  // at_least[k] = number of blocks of size >= k
  std::vector<int> at_least;
  for (std::size_t k = 1; k < nullity.size(); ++k) {
    at_least.push_back(nullity[k] - nullity[k - 1]);
  }
  at_least.push_back(0);
  for (std::size_t k = at_least.size() - 1; k-- > 0;) {
    for (int c = 0; c < at_least[k] - at_least[k + 1]; ++c) {
      out.sizes.push_back(static_cast<int>(k + 1));
    }
  }
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  int total = std::accumulate(out.sizes.begin(), out.sizes.end(), 0);
  if (total != e->alg_mult) out.low_confidence = true;
  return out;
}

}  // namespace consctl
