#pragma once

#include <utility>
#include <vector>

#include "qhahn/ensemble.hpp"
#include "qhahn/painleve.hpp"

namespace qhahn {

// Edge-scaling family: q = q0^{1/N}, alpha = q0^a, beta = q0^b, k = round(k0 N),
// lattice indices {0..N-1}.
struct ScalingParams {
  Real q0;  // in (0,1)
  Real k0;  // in (0,1)
  Real a;   // < -1 (admissibility of alpha = q0^a)
  Real b;   // < -1
  long N = 0;

  Real A() const { return pow(q0, a); }
  Real B() const { return pow(q0, b); }
  Real K() const { return pow(q0, k0); }
  long k() const { return round_half_away(k0 * Real(N)).to_long(); }
  EnsembleParams ensemble() const;
};

enum class EdgeBranch { rightmost, leftmost };

// Coefficients of the three-term difference equation satisfied by the
// ensemble's polynomials in the lattice variable:
// lambda_n P_n(x) = B(x) P_n(x+1) - (B(x)+D(x)) P_n(x) + D(x) P_n(x-1).
Real bcoef(long x, const EnsembleParams& p);
Real dcoef(long x, const EnsembleParams& p);
Real eigenvalue(long n, const EnsembleParams& p);

// Apply the sqrt(omega)-conjugated operator to a vector indexed by 0..N.
std::vector<Real> apply_symmetrized(const std::vector<Real>& f, const EnsembleParams& p);

// Worst relative defect of the eigen-relation on sqrt(omega) P_n.
Real eigen_relation_defect(const EnsembleParams& p, long n);

// Edge location: p = q0^{c1} solves 2 sqrt(Binf Dinf) = Binf + Dinf + lambda*
// with lambda* = (1-K)(1-ABK)/K; two real roots = the two particle edges,
// rightmost = the larger c1.
Real compute_c1(const ScalingParams& sp, EdgeBranch branch);

// Fluctuation scale from the Taylor matching of the symmetrized operator to
// the Airy form; the unique real root of c2^3 (-F'(c1)) = sqrt(Binf Dinf)(p),
// bracketed on (0, 10).
Real compute_c2(const ScalingParams& sp, EdgeBranch branch);

// Airy function and derivative. Maclaurin series under escalated precision
// for x <= 8 (including the oscillatory range), asymptotic expansion for
// 8 < x <= 40.
Real airy(const Real& x);
Real airy_prime(const Real& x);

// Gauss-Legendre rule on [0,1].
void gauss_legendre_01(long m, std::vector<Real>* nodes, std::vector<Real>* weights);

// Tracy-Widom GUE distribution by the Nystrom-discretized Airy-kernel
// Fredholm determinant on (u, infinity). With check=true the value is
// computed at `order` and 2*order and must agree to 1e-10.
Real tw_f2(const Real& u, long order, bool check = true);
// Single-order evaluation (no inter-order check).
Real tw_f2_raw(const Real& u, long order);

struct TWGrid {
  std::vector<Real> u, F2, density;
  long quadrature_order = 0;
};

TWGrid build_tw_grid(const Real& umin, const Real& umax, long points, long order);

// Mean of the TW law from the grid machinery (quadrature of u F2'(u)).
Real tw_mean(long order);

// (D(s+1) - D(s)) c2 N^{1/3} at s = floor(c1 N + c2 u N^{1/3}), evaluated on
// a u-grid from the recurrence-path gap sequence.
std::vector<std::pair<Real, Real>> scaled_density(const ScalingParams& sp,
                                                  const std::vector<Real>& ugrid);

struct ConvergencePoint {
  long N;
  Real logN, logErr, mean_qh;
};

struct ConvergenceResult {
  std::vector<ConvergencePoint> points;
  Real slope;       // least-squares fit of logErr vs logN
  Real tw_mean_val;
};

ConvergenceResult convergence_experiment(const ScalingParams& family,
                                         const std::vector<long>& n_list, long tw_order = 60);

}  // namespace qhahn
