#pragma once

#include <array>
#include <vector>

#include "qhahn/real.hpp"

namespace qhahn {

// Dense row-major matrix of Real. Small sizes only (kernel restrictions,
// Nystrom systems, coefficient solves).
struct MatrixHP {
  long rows = 0, cols = 0;
  std::vector<Real> a;

  MatrixHP() = default;
  MatrixHP(long r, long c) : rows(r), cols(c), a(static_cast<size_t>(r * c)) {}
  Real& operator()(long i, long j) { return a[static_cast<size_t>(i * cols + j)]; }
  const Real& operator()(long i, long j) const { return a[static_cast<size_t>(i * cols + j)]; }

  static MatrixHP identity(long n) {
    MatrixHP m(n, n);
    for (long i = 0; i < n; ++i) m(i, i) = Real(1);
    return m;
  }

  Real max_abs() const {
    Real m(0);
    for (const Real& x : a) m = max(m, abs(x));
    return m;
  }
};

using Vec2 = std::array<Real, 2>;

// Determinant by LU with partial pivoting.
Real det(const MatrixHP& m);

// Solve A x = b in place of a copy (square, well-conditioned enough for the
// structured systems used here). Throws NotSingular on a zero pivot column.
std::vector<Real> solve(const MatrixHP& A, const std::vector<Real>& b);

// Nonzero v with m v ~ 0 for a numerically rank-1 (or rank-0 -> RankZero)
// 2x2 matrix; largest-magnitude entry normalized to 1.
Vec2 null_vector_2x2(const MatrixHP& m);

// Column-space generator of a numerically rank-1 2x2 matrix, largest entry 1.
Vec2 rank1_residue_direction(const MatrixHP& m);

inline Real dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
// 90-degree rotation; J(v) is orthogonal to v.
inline Vec2 rot90(const Vec2& v) { return {-v[1], v[0]}; }

}  // namespace qhahn
