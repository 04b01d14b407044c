#include "qhahn/linalg.hpp"

#include <utility>

#include "qhahn/errors.hpp"

namespace qhahn {

Real det(const MatrixHP& m) {
  if (m.rows != m.cols) throw DomainError("det: matrix not square");
  long n = m.rows;
  if (n == 0) return Real(1);
  MatrixHP lu = m;
  Real d(1);
  for (long c = 0; c < n; ++c) {
    long piv = c;
    Real best = abs(lu(c, c));
    for (long r = c + 1; r < n; ++r) {
      Real v = abs(lu(r, c));
      if (v > best) { best = v; piv = r; }
    }
    if (best.is_zero()) return Real(0);
    if (piv != c) {
      for (long j = 0; j < n; ++j) std::swap(lu(c, j), lu(piv, j));
      d = -d;
    }
    d *= lu(c, c);
    for (long r = c + 1; r < n; ++r) {
      Real f = lu(r, c) / lu(c, c);
      for (long j = c + 1; j < n; ++j) lu(r, j) -= f * lu(c, j);
    }
  }
  return d;
}

std::vector<Real> solve(const MatrixHP& A, const std::vector<Real>& b) {
  if (A.rows != A.cols || static_cast<long>(b.size()) != A.rows)
    throw DomainError("solve: shape mismatch");
  long n = A.rows;
  MatrixHP lu = A;
  std::vector<Real> x = b;
  for (long c = 0; c < n; ++c) {
    long piv = c;
    Real best = abs(lu(c, c));
    for (long r = c + 1; r < n; ++r) {
      Real v = abs(lu(r, c));
      if (v > best) { best = v; piv = r; }
    }
    if (best.is_zero()) throw NotSingular("solve: singular system");
    if (piv != c) {
      for (long j = 0; j < n; ++j) std::swap(lu(c, j), lu(piv, j));
      std::swap(x[static_cast<size_t>(c)], x[static_cast<size_t>(piv)]);
    }
    for (long r = c + 1; r < n; ++r) {
      Real f = lu(r, c) / lu(c, c);
      for (long j = c + 1; j < n; ++j) lu(r, j) -= f * lu(c, j);
      x[static_cast<size_t>(r)] -= f * x[static_cast<size_t>(c)];
    }
  }
  for (long r = n - 1; r >= 0; --r) {
    for (long j = r + 1; j < n; ++j) x[static_cast<size_t>(r)] -= lu(r, j) * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(r)] /= lu(r, r);
  }
  return x;
}

namespace {

void require_2x2(const MatrixHP& m) {
  if (m.rows != 2 || m.cols != 2) throw DomainError("expected 2x2 matrix");
}

Vec2 normalize_largest(Vec2 v) {
  Real s = abs(v[0]) >= abs(v[1]) ? v[0] : v[1];
  return {v[0] / s, v[1] / s};
}

}  // namespace

Vec2 null_vector_2x2(const MatrixHP& m) {
  require_2x2(m);
  Real eps = comparison_epsilon();
  Real norm = m.max_abs();
  if (norm.is_zero() || norm < eps) throw RankZero("matrix is numerically zero");
  Real d = det(m);
  if (abs(d) > eps * norm * norm) throw NotSingular("matrix is numerically rank 2");
  // kernel = orthogonal complement of the dominant row
  Vec2 r0{m(0, 0), m(0, 1)}, r1{m(1, 0), m(1, 1)};
  Vec2 row = (max(abs(r0[0]), abs(r0[1])) >= max(abs(r1[0]), abs(r1[1]))) ? r0 : r1;
  return normalize_largest(rot90(row));
}

Vec2 rank1_residue_direction(const MatrixHP& m) {
  require_2x2(m);
  Real eps = comparison_epsilon();
  Real norm = m.max_abs();
  if (norm.is_zero() || norm < eps) throw RankZero("matrix is numerically zero");
  Real d = det(m);
  if (abs(d) > eps * norm * norm) throw NotSingular("matrix is numerically rank 2");
  Vec2 c0{m(0, 0), m(1, 0)}, c1{m(0, 1), m(1, 1)};
  Vec2 col = (max(abs(c0[0]), abs(c0[1])) >= max(abs(c1[0]), abs(c1[1]))) ? c0 : c1;
  return normalize_largest(col);
}

}  // namespace qhahn
