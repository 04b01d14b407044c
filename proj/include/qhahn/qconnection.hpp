#pragma once

#include <array>
#include <utility>

#include "qhahn/ensemble.hpp"
#include "qhahn/linalg.hpp"
#include "qhahn/painleve.hpp"
#include "qhahn/poly.hpp"

namespace qhahn {

// 2x2 rational matrix N(z)/den(z) with polynomial numerators of degree <= 3
// and a cubic denominator (z-a2)(z-a4)(z-a6).
struct RationalMatrix2 {
  std::array<std::array<Poly, 2>, 2> num;
  Poly den;

  MatrixHP eval(const Real& z) const;
  MatrixHP eval_num(const Real& z) const;  // numerator matrix only
};

// A q^{-1}-connection of the fixed singularity type: zeros (a1, a3, a5),
// poles (a2, a4, a6), det N = u v prod(z - a_i), N(0) = w I.
struct ConnectionState {
  RationalMatrix2 matrix;
  Real a1, a3, a5;  // zeros
  Real a2, a4, a6;  // poles
  Real u, v;
  Real w;           // numerator constant N11(0) = N22(0)
  Real q;
  Vec2 kernel_vec;   // direction spanning ker of the numerator at a1
  Vec2 residue_vec;  // row-space direction of the numerator at a2
  long step_index = 0;

  bool coincident() const;  // a1 == a2 within tolerance
};

// Relative defect of det N(z) = u v prod (z - a_i) at one sample point.
Real det_defect(const ConnectionState& cs, const Real& z);

// diag(q w(q^{-1}z)/w(z), 1) written over the common denominator
// alpha beta (z - q)(z - beta^{-1} q^{-N}).
RationalMatrix2 build_A0(const EnsembleParams& p);

// Explicit initial connection at section s = k.
ConnectionState build_Ak(const EnsembleParams& p);

// Section-s connection assembled from the orthogonal-polynomial solution of
// the associated Riemann-Hilbert problem (independent route; used as the
// recompute-from-scratch guard and by tests).
ConnectionState section_connection(const EnsembleParams& p, long s);

// Gauge-invariant coordinates: t = second root of the lower-left numerator,
// r through the degree-4 ratio at t.
std::pair<Real, Real> extract_coordinates(const ConnectionState& cs);

// One isomonodromy step along the ensemble trajectory: the moving zero/pole
// pair (a1, a2) -> (a1/q, a2/q), w -> w/q. Coincident pairs (the ensemble
// case) use the nilpotent R-matrix; distinct pairs the rank-one one.
ConnectionState modification_step(const ConnectionState& cs);

// Literal one-step deformation in the opposite direction (a -> qa) with the
// kernel/residue vector propagation; returns the new state carrying the
// propagated vectors. Requires a1 != a2.
ConnectionState modification_step_down(const ConnectionState& cs);

// Second logarithmic derivative of the tau-function for the modification
// chain through (before, after): equals D(s+1) D(s-1) / D(s)^2 when `before`
// sits at section s. Generic states use the propagated-pairing ratio; the
// coincident ensemble trajectory evaluates the same pairing on a split
// representative with the double point separated by delta = 2^{-100}.
Real tau_second_derivative(const ConnectionState& before, const ConnectionState& after);

// Closed form of the same quantity from the coordinates of the unhatted
// state (t, r), the hatted state (t_hat, r_hat), and the unhatted parameters.
Real tau_closed_form(const Real& t, const Real& r, const Real& t_hat, const Real& r_hat,
                     const ConnectionState& unhatted);

// Representative with prescribed coordinates and type data; w^2 must equal
// u v prod(a_i). Throws NonGenericConnection when no real representative
// exists at the requested point.
ConnectionState normal_form_from_coords(const Real& t, const Real& r,
                                        const std::array<Real, 6>& a,  // a1..a6
                                        const Real& u, const Real& v, const Real& w,
                                        const Real& q);

// q-gauge transform by R = [[c1, l0 + l1 z], [0, c2]] (test helper; the
// coordinates are invariant under it).
ConnectionState gauge_transform(const ConnectionState& cs, const Real& c1, const Real& c2,
                                const Real& l0, const Real& l1);

// Gap sequence through the connection path: seeds D(k), D(k+1), then
// multiplies tau ratios along the modification chain.
GapSequence reconstruct_gaps_tau(const EnsembleParams& p);

}  // namespace qhahn
