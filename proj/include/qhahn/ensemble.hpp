#pragma once

#include <vector>

#include "qhahn/linalg.hpp"
#include "qhahn/poly.hpp"
#include "qhahn/real.hpp"

namespace qhahn {

// (y; q)_n = (1-y)(1-yq)...(1-yq^{n-1})
Real qpochhammer(const Real& y, const Real& q, long n);

struct EnsembleParams {
  Real q;      // in (0,1)
  long N = 0;  // lattice max index, points q^{-i}, i = 0..N
  long k = 0;  // particle count, 1 <= k <= N
  Real alpha;
  Real beta;
};

// Throws InadmissibleParams unless the parameters lie in one of the two
// admissible ranges and every weight is strictly positive.
void validate(const EnsembleParams& p);

// omega(x) = (alpha beta q)^{-x} (alpha q; q)_x (q^{-N}; q)_x /
//            ((q; q)_x (beta^{-1} q^{-N}; q)_x)
Real weight(long x, const EnsembleParams& p);

struct Lattice {
  std::vector<Real> points;   // y_i = q^{-i}, strictly increasing
  std::vector<Real> weights;  // omega(i) > 0
};

Lattice build_lattice(const EnsembleParams& p);

// Monic orthogonal polynomials P_0..P_degree on the first `support_size`
// lattice points, built by the Stieltjes three-term recurrence. Polynomials
// are carried three ways: values on the support nodes (recurrence), Newton
// coefficients on the nodes (stable evaluation at arbitrary points), and
// monic power coefficients (exact derivatives for the kernel diagonal).
struct OrthoBasis {
  long support_size = 0;
  long degree = 0;
  std::vector<Real> nodes;
  std::vector<std::vector<Real>> values;  // values[j][x], x < support_size
  std::vector<Poly> newton;               // newton[j][m] on nodes[0..m-1]
  std::vector<Poly> monic;                // power basis
  std::vector<Real> norms;                // h_j = (P_j, P_j)

  Real eval(long j, const Real& z) const;  // Newton-basis Horner
};

OrthoBasis build_basis(const EnsembleParams& p, long support, long degree);
inline OrthoBasis build_basis(const EnsembleParams& p, long support) {
  return build_basis(p, support, p.k);
}

// Z = prod_{i<k} h_i on the full support N+1.
Real normalizer_Z(const EnsembleParams& p, const OrthoBasis& full_basis);

// Christoffel-Darboux kernel entry K(y_i, y_j) (sqrt-omega conjugated),
// basis built on the full support with degree >= k.
Real kernel_entry(const EnsembleParams& p, const Lattice& lat, const OrthoBasis& basis,
                  long i, long j);

MatrixHP kernel_matrix(const EnsembleParams& p, const Lattice& lat, const OrthoBasis& basis,
                       long section_start);

// D_k(s) = det(1 - K restricted to indices s..N); 1 for s >= N+1, 0 for s < k.
Real gap_direct(const EnsembleParams& p, long s);

// Same via the defining normalized sum over k-subsets; guard C(N+1,k) <= 1e6.
Real gap_bruteforce(const EnsembleParams& p, long s);

// Working precision a computation at these parameters deserves:
// max(256, 4 N log2(1/q)).
long suggested_bits(const EnsembleParams& p);

}  // namespace qhahn
