#pragma once

#include <utility>
#include <vector>

#include "qhahn/ensemble.hpp"

namespace qhahn {

// Trajectory point of the asymmetric q-Painleve V system attached to the
// ensemble. `w` is the common constant term of the section connection's
// numerator matrix; it picks up a factor 1/q per unit step in s.
struct PainleveState {
  long s = 0;
  Real t;
  Real r;
  Real w;
};

// Section bookkeeping: the moving zero/pole location and numerator constant.
Real section_point(const EnsembleParams& p, long s);   // q^{-s+1}
Real section_wnum(const EnsembleParams& p, long s);    // -beta^{-1} q^{-N-s+2}

// Lagrange-type residue weights: rho_i = 1/(omega(i) prod_{j<k, j!=i} (y_i-y_j)^2).
// For i == k the product runs over all j = 0..k-1.
Real rho_weight(const Lattice& lat, long i, long k);

// State at s = k: t_k = -f1/f2 from the lower-left numerator entry of the
// initial connection, r_k = -1/a4 = -beta q^N.
PainleveState initial_state(const EnsembleParams& p);

// The two coefficients of the initial lower-left numerator f2 z^2 + f1 z.
std::pair<Real, Real> initial_f1_f2(const EnsembleParams& p);

// One step s -> s+1 of the ensemble-specialized recurrence: the equation
// pair is solved for r_{s+1} first (linear), then t_{s+1} (linear).
PainleveState qpv_step_qhahn(const PainleveState& st, const EnsembleParams& p);

// Residuals of the two recurrence equations on a consecutive state pair,
// normalized by the magnitude of each side.
std::pair<Real, Real> qpv_residuals(const PainleveState& st, const PainleveState& next,
                                    const EnsembleParams& p);

// Generic-coordinate form. A step sends (t, r) to (t_hat, r_hat) and the
// singularity data (a1, a2, w) to (q a1, q a2, q w); the equations carry the
// deformation multiplier as 1/q (documented convention, oracle-verified).
struct GenericQPVParams {
  Real a1, a2, a3, a4, a5, a6;
  Real u, v, w, q;
};

std::pair<Real, Real> qpv_step_generic(const Real& t, const Real& r, const GenericQPVParams& gp);

// Advance the parameter pack after a generic step.
GenericQPVParams shift_params(const GenericQPVParams& gp);

// D_k(s) D_k(s-2) / D_k(s-1)^2 from the states at s-1 and s.
Real ratio_formula(const PainleveState& st_prev, const PainleveState& st, const EnsembleParams& p);

// Prop-D seeds.
Real dkk(const EnsembleParams& p);
Real dkk1(const EnsembleParams& p);

enum class GapProvenance { direct, recurrence, tau };

struct GapSequence {
  std::vector<std::pair<long, Real>> values;  // (s, D_k(s)), s = k..N+1
  GapProvenance provenance = GapProvenance::recurrence;
};

// Seed with D_k(k), D_k(k+1) and roll the recurrence up to s = N+1.
GapSequence reconstruct_gaps(const EnsembleParams& p);

// All states s = k..N+1 (used by the cross-checks against the connection path).
std::vector<PainleveState> qpv_trajectory(const EnsembleParams& p);

}  // namespace qhahn
