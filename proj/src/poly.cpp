#include "qhahn/poly.hpp"

namespace qhahn {

Poly poly_add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < r.size(); ++i) {
    if (i < a.size()) r[i] += a[i];
    if (i < b.size()) r[i] += b[i];
  }
  return r;
}

Poly poly_scale(const Poly& a, const Real& c) {
  Poly r = a;
  for (Real& x : r) x *= c;
  return r;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Real poly_eval(const Poly& a, const Real& z) {
  Real r(0);
  for (size_t i = a.size(); i-- > 0;) r = r * z + a[i];
  return r;
}

Poly poly_derivative(const Poly& a) {
  if (a.size() <= 1) return {Real(0)};
  Poly r(a.size() - 1);
  for (size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * Real(static_cast<long>(i));
  return r;
}

Poly poly_divide_linear(const Poly& a, const Real& root, Real* rem) {
  if (a.size() <= 1) {
    if (rem) *rem = a.empty() ? Real(0) : a[0];
    return {Real(0)};
  }
  Poly q(a.size() - 1);
  Real carry = a.back();
  for (size_t i = a.size() - 1; i-- > 0;) {
    q[i] = carry;
    carry = a[i] + carry * root;
  }
  if (rem) *rem = carry;
  return q;
}

Poly poly_trim(Poly a, const Real& tol) {
  Real m = poly_max_abs(a);
  Real cut = tol * (m + Real(1));
  while (a.size() > 1 && abs(a.back()) < cut) a.pop_back();
  return a;
}

Real poly_max_abs(const Poly& a) {
  Real m(0);
  for (const Real& x : a) m = max(m, abs(x));
  return m;
}

Poly poly_from_roots(const std::vector<Real>& roots) {
  Poly r{Real(1)};
  for (const Real& x : roots) r = poly_mul(r, Poly{-x, Real(1)});
  return r;
}

}  // namespace qhahn
