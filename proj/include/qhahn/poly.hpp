#pragma once

#include <vector>

#include "qhahn/real.hpp"

namespace qhahn {

// Dense polynomial over Real, ascending coefficients.
using Poly = std::vector<Real>;

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, const Real& c);
Poly poly_mul(const Poly& a, const Poly& b);
Real poly_eval(const Poly& a, const Real& z);
Poly poly_derivative(const Poly& a);
// Synthetic division by (z - root); remainder returned through `rem`.
Poly poly_divide_linear(const Poly& a, const Real& root, Real* rem);
// Drop trailing coefficients below tol (relative to the largest coefficient).
Poly poly_trim(Poly a, const Real& tol);
Real poly_max_abs(const Poly& a);
// (z - r0)(z - r1)...
Poly poly_from_roots(const std::vector<Real>& roots);

}  // namespace qhahn
