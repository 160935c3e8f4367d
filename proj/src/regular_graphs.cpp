#include "consctl/regular_graphs.hpp"

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "consctl/error.hpp"

namespace consctl {

namespace {

void require_regular_unit(const DirectedGraph& g) {
  if (!is_in_degree_regular(g)) {
    throw Error(ErrorKind::NotInDegreeRegular, "in-degrees differ between nodes");
  }
  for (const Edge& e : g.edges()) {
    if (e.weight != 1.0) {
      throw Error(ErrorKind::UnitWeightsRequired,
                  "edge " + std::to_string(e.src + 1) + " -> " + std::to_string(e.dst + 1) +
                      " has weight " + std::to_string(e.weight) + "; path counts need unit weights");
    }
  }
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::Overflow, "walk count overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::Overflow, "walk count overflow");
  return r;
}

IntMatrix indicator(const DirectedGraph& g) {
  IntMatrix A(g.size(), g.size());
  for (const Edge& e : g.edges()) A(e.dst, e.src) = 1;
  return A;
}

IntMatrix multiply(const IntMatrix& X, const IntMatrix& Y) {
  IntMatrix Z(X.rows, Y.cols);
  for (int i = 0; i < X.rows; ++i) {
    for (int k = 0; k < X.cols; ++k) {
      const std::int64_t x = X(i, k);
      if (x == 0) continue;
      for (int j = 0; j < Y.cols; ++j) {
        if (Y(k, j) != 0) Z(i, j) = checked_add(Z(i, j), checked_mul(x, Y(k, j)));
      }
    }
  }
  return Z;
}

// Fraction-free Gaussian elimination.
bool bareiss_nonsingular(const IntMatrix& M) {
  using boost::multiprecision::cpp_int;
  const int n = M.rows;
  std::vector<std::vector<cpp_int>> a(n, std::vector<cpp_int>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = M(i, j);
  }
  cpp_int prev = 1;
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    while (pivot < n && a[pivot][k] == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(a[k], a[pivot]);
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      }
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return true;
}

// Bit mask of the rows covered by column j of S (plus j itself).
std::vector<std::uint64_t> column_cover(const IntMatrix& S) {
  std::vector<std::uint64_t> cover(S.cols, 0);
  for (int j = 0; j < S.cols; ++j) {
    cover[j] |= std::uint64_t{1} << j;
    for (int i = 0; i < S.rows; ++i) {
      if (S(i, j) != 0) cover[j] |= std::uint64_t{1} << i;
    }
  }
  return cover;
}

bool cover_exists(const std::vector<std::uint64_t>& cover, int k, int start,
                  std::uint64_t acc, std::uint64_t full, std::uint64_t& tested,
                  std::uint64_t budget) {
  if (k == 0) {
    if (++tested > budget) {
      throw Error(ErrorKind::BudgetExceeded,
                  "set cover search exceeded " + std::to_string(budget) + " subsets");
    }
    return acc == full;
  }
  const int n = static_cast<int>(cover.size());
  for (int j = start; j <= n - k; ++j) {
    if (cover_exists(cover, k - 1, j + 1, acc | cover[j], full, tested, budget)) return true;
  }
  return false;
}

}  // namespace

IntMatrix path_count_matrix(const DirectedGraph& g) {
  require_regular_unit(g);
  const int n = g.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "path_count_matrix needs n >= 2");
  const IntMatrix A = indicator(g);
  IntMatrix M(n - 1, n - 1);
  IntMatrix power = A;
  for (int j = 0; j < n - 1; ++j) {
    if (j > 0) power = multiply(A, power);
    for (int i = 0; i < n - 1; ++i) M(i, j) = power(i + 1, 0);
  }
  return M;
}

bool regular_slc_by_agent1(const DirectedGraph& g) {
  if (g.size() == 1) {
    require_regular_unit(g);
    return true;
  }
  return bareiss_nonsingular(path_count_matrix(g));
}

IntMatrix walk_sum_matrix(const DirectedGraph& g) {
  require_regular_unit(g);
  const int n = g.size();
  const IntMatrix A = indicator(g);
  IntMatrix S(n, n);
  IntMatrix power = A;
  for (int k = 1; k < n; ++k) {
    if (k > 1) power = multiply(A, power);
    for (std::size_t t = 0; t < S.data.size(); ++t) {
      S.data[t] = checked_add(S.data[t], power.data[t]);
    }
  }
  return S;
}

bool regular_never_slc(const DirectedGraph& g) {
  const IntMatrix S = walk_sum_matrix(g);
  for (int j = 0; j < S.cols; ++j) {
    bool has_zero = false;
    for (int i = 0; i < S.rows && !has_zero; ++i) has_zero = i != j && S(i, j) == 0;
    if (!has_zero) return false;
  }
  return true;
}

int regular_leader_lower_bound(const DirectedGraph& g, std::uint64_t budget) {
  const IntMatrix S = walk_sum_matrix(g);
  const int n = S.rows;
  if (n > 63) throw Error(ErrorKind::BudgetExceeded, "set cover limited to 63 nodes");
  const std::vector<std::uint64_t> cover = column_cover(S);
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  std::uint64_t tested = 0;
  for (int k = 1; k <= n; ++k) {
    if (cover_exists(cover, k, 0, 0, full, tested, budget)) return k;
  }
  return n;
}

bool regular_structural(const DirectedGraph& g) {
  const IntMatrix S = walk_sum_matrix(g);
  for (int j = 0; j < S.cols; ++j) {
    bool all = true;
    for (int i = 0; i < S.rows && all; ++i) all = i == j || S(i, j) != 0;
    if (all) return true;
  }
  return false;
}

}  // namespace consctl
