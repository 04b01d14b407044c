#include "qhahn/real.hpp"

#include <cstdio>
#include <vector>

namespace qhahn {

namespace {
thread_local long g_bits = 256;
}

long PrecisionContext::bits() { return g_bits; }

void PrecisionContext::set_bits(long bits) {
  if (bits < 64) throw DomainError("mantissa_bits must be >= 64");
  g_bits = bits;
}

std::string Real::str(int digits) const {
  if (digits < 2) digits = 2;
  std::vector<char> buf(static_cast<size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

#define QHAHN_REAL_FN1(NAME, FN)                       \
  Real NAME(const Real& a) {                           \
    Real r;                                            \
    FN(r.raw(), a.raw(), MPFR_RNDN);                   \
    if (!mpfr_number_p(r.raw()))                       \
      throw PrecisionOverflow(#NAME ": non-finite");   \
    return r;                                          \
  }

QHAHN_REAL_FN1(abs, mpfr_abs)
QHAHN_REAL_FN1(exp, mpfr_exp)
QHAHN_REAL_FN1(gamma, mpfr_gamma)
QHAHN_REAL_FN1(cbrt, mpfr_cbrt)
#undef QHAHN_REAL_FN1

Real sqrt(const Real& a) {
  if (a.sign() < 0) throw DomainError("sqrt of negative value");
  Real r;
  mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Real log(const Real& a) {
  if (a.sign() <= 0) throw DomainError("log of non-positive value");
  Real r;
  mpfr_log(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Real pow(const Real& base, long e) {
  Real r;
  mpfr_pow_si(r.raw(), base.raw(), e, MPFR_RNDN);
  if (!mpfr_number_p(r.raw())) throw PrecisionOverflow("pow: non-finite");
  return r;
}

Real pow(const Real& base, const Real& e) {
  if (base.sign() <= 0) throw DomainError("pow: base must be positive");
  Real r;
  mpfr_pow(r.raw(), base.raw(), e.raw(), MPFR_RNDN);
  if (!mpfr_number_p(r.raw())) throw PrecisionOverflow("pow: non-finite");
  return r;
}

Real rootn(const Real& a, unsigned long n) {
  if (a.sign() < 0) throw DomainError("rootn of negative value");
  Real r;
#if MPFR_VERSION_MAJOR >= 4
  mpfr_rootn_ui(r.raw(), a.raw(), n, MPFR_RNDN);
#else
  mpfr_root(r.raw(), a.raw(), n, MPFR_RNDN);
#endif
  return r;
}

Real floor(const Real& a) {
  Real r;
  mpfr_floor(r.raw(), a.raw());
  return r;
}

Real round_half_away(const Real& a) {
  Real r;
  mpfr_round(r.raw(), a.raw());
  return r;
}

Real max(const Real& a, const Real& b) { return a >= b ? a : b; }
Real min(const Real& a, const Real& b) { return a <= b ? a : b; }

Real comparison_epsilon() { return pow2(-PrecisionContext::bits() / 2); }

Real pow2(long e) {
  Real r(1);
  mpfr_mul_2si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

Real const_pi() {
  Real r;
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}

Real to_working(const Real& a) {
  Real r;
  mpfr_set(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

}  // namespace qhahn
