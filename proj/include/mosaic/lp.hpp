#ifndef MOSAIC_LP_HPP
#define MOSAIC_LP_HPP

#include "mosaic/common.hpp"

#include <limits>
#include <vector>

namespace mosaic::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
  Status status = Status::infeasible;
  double value = 0.0;
  Vec x;
};

/**
 * Dense two-phase simplex for  maximize c'x  s.t.  A x <= b,  x >= 0.
 *
 * Intended for the small programs that show up in this library (a handful
 * of variables, at most a few hundred constraints).  Uses Bland-style tie
 * breaking on the basis labels, which rules out cycling.
 */
inline Result maximize(const Mat& A, const Vec& b, const Vec& c, double eps = 1e-12) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  require(b.size() == m && c.size() == n, "lp::maximize: dimension mismatch");

  Mat D = Mat::Zero(m + 2, n + 2);
  std::vector<int> basis(m), nonbasis(n + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) D(i, j) = A(i, j);
    D(i, n) = -1.0;
    D(i, n + 1) = b[i];
    basis[i] = n + i;
  }
  for (int j = 0; j < n; ++j) {
    nonbasis[j] = j;
    D(m, j) = -c[j];
  }
  nonbasis[n] = -1;
  D(m + 1, n) = 1.0;

  auto pivot = [&](int r, int s) {
    const double inv = 1.0 / D(r, s);
    for (int i = 0; i < m + 2; ++i) {
      if (i == r || D(i, s) == 0.0) continue;
      const double f = D(i, s) * inv;
      for (int j = 0; j < n + 2; ++j) {
        if (j != s) D(i, j) -= D(r, j) * f;
      }
    }
    for (int j = 0; j < n + 2; ++j) {
      if (j != s) D(r, j) *= inv;
    }
    for (int i = 0; i < m + 2; ++i) {
      if (i != r) D(i, s) *= -inv;
    }
    D(r, s) = inv;
    std::swap(basis[r], nonbasis[s]);
  };

  auto run = [&](int phase) -> bool {
    const int row = phase == 1 ? m + 1 : m;
    for (;;) {
      int s = -1;
      for (int j = 0; j <= n; ++j) {
        if (phase == 2 && nonbasis[j] == -1) continue;
        if (s == -1 || D(row, j) < D(row, s) ||
            (D(row, j) == D(row, s) && nonbasis[j] < nonbasis[s])) {
          s = j;
        }
      }
      if (D(row, s) > -eps) return true;
      int r = -1;
      for (int i = 0; i < m; ++i) {
        if (D(i, s) < eps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = D(i, n + 1) / D(i, s);
        const double rhs = D(r, n + 1) / D(r, s);
        if (lhs < rhs || (lhs == rhs && basis[i] < basis[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  };

  Result result;
  int r = 0;
  for (int i = 1; i < m; ++i) {
    if (D(i, n + 1) < D(r, n + 1)) r = i;
  }
  if (m > 0 && D(r, n + 1) < -eps) {
    pivot(r, n);
    if (!run(1) || D(m + 1, n + 1) < -eps) {
      result.status = Status::infeasible;
      return result;
    }
    for (int i = 0; i < m; ++i) {
      if (basis[i] == -1) {
        int s = -1;
        for (int j = 0; j <= n; ++j) {
          if (s == -1 || D(i, j) < D(i, s) || (D(i, j) == D(i, s) && nonbasis[j] < nonbasis[s])) {
            s = j;
          }
        }
        pivot(i, s);
      }
    }
  }
  if (!run(2)) {
    result.status = Status::unbounded;
    result.value = std::numeric_limits<double>::infinity();
    return result;
  }
  result.status = Status::optimal;
  result.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= 0 && basis[i] < n) result.x[basis[i]] = D(i, n + 1);
  }
  result.value = D(m, n + 1);
  return result;
}

}  // namespace mosaic::lp

#endif  // MOSAIC_LP_HPP
