#pragma once

#include <mpfr.h>

#include <cstdint>
#include <string>
#include <utility>

#include "qhahn/errors.hpp"

namespace qhahn {

// Working binary precision, thread-local. All Real results are rounded to
// this many mantissa bits with round-to-nearest-even, so a computation is
// reproducible given the precision alone.
class PrecisionContext {
 public:
  static long bits();
  static void set_bits(long bits);

  // Scoped override.
  class Guard {
   public:
    explicit Guard(long bits) : saved_(PrecisionContext::bits()) {
      PrecisionContext::set_bits(bits);
    }
    ~Guard() { PrecisionContext::set_bits(saved_); }
    Guard(const Guard&) = delete;
    Guard& operator=(const Guard&) = delete;

   private:
    long saved_;
  };
};

// Arbitrary-precision binary float. Every value is finite; operations that
// would produce inf/nan throw PrecisionOverflow.
class Real {
 public:
  Real() { mpfr_init2(v_, PrecisionContext::bits()); mpfr_set_zero(v_, 1); }
  Real(long n) {  // NOLINT: implicit by design for integer literals
    mpfr_init2(v_, PrecisionContext::bits());
    mpfr_set_si(v_, n, MPFR_RNDN);
  }
  Real(int n) : Real(static_cast<long>(n)) {}  // NOLINT
  explicit Real(double d) {
    mpfr_init2(v_, PrecisionContext::bits());
    mpfr_set_d(v_, d, MPFR_RNDN);
    check();
  }
  // Decimal string, rounded to the working precision.
  explicit Real(const std::string& s) {
    mpfr_init2(v_, PrecisionContext::bits());
    if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0 && !mpfr_number_p(v_))
      throw DomainError("unparsable numeric literal '" + s + "'");
  }
  Real(const Real& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  Real(Real&& o) noexcept { mpfr_init2(v_, 2); mpfr_swap(v_, o.v_); }
  Real& operator=(const Real& o) {
    if (this != &o) { mpfr_set_prec(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
    return *this;
  }
  Real& operator=(Real&& o) noexcept { mpfr_swap(v_, o.v_); return *this; }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  bool is_zero() const { return mpfr_zero_p(v_); }
  int sign() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

  // Decimal string with `digits` significant digits (shortest form "%.*Rg").
  std::string str(int digits) const;

  friend Real operator-(const Real& a) { Real r = make(); mpfr_neg(r.v_, a.v_, MPFR_RNDN); return r; }

#define QHAHN_REAL_BINOP(OP, FN)                                      \
  friend Real operator OP(const Real& a, const Real& b) {             \
    Real r = make();                                                  \
    FN(r.v_, a.v_, b.v_, MPFR_RNDN);                                  \
    r.check();                                                        \
    return r;                                                         \
  }
  QHAHN_REAL_BINOP(+, mpfr_add)
  QHAHN_REAL_BINOP(-, mpfr_sub)
  QHAHN_REAL_BINOP(*, mpfr_mul)
#undef QHAHN_REAL_BINOP
  friend Real operator/(const Real& a, const Real& b) {
    if (mpfr_zero_p(b.v_)) throw PrecisionOverflow("division by zero");
    Real r = make();
    mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
    r.check();
    return r;
  }

  Real& operator+=(const Real& b) { mpfr_add(v_, v_, b.v_, MPFR_RNDN); check(); return *this; }
  Real& operator-=(const Real& b) { mpfr_sub(v_, v_, b.v_, MPFR_RNDN); check(); return *this; }
  Real& operator*=(const Real& b) { mpfr_mul(v_, v_, b.v_, MPFR_RNDN); check(); return *this; }
  Real& operator/=(const Real& b) { *this = *this / b; return *this; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend bool operator!=(const Real& a, const Real& b) { return !(a == b); }
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

 private:
  static Real make() { return Real(); }
  void check() const {
    if (!mpfr_number_p(v_))
      throw PrecisionOverflow("non-finite result escaped an operation");
  }
  mpfr_t v_;
};

Real abs(const Real& a);
Real sqrt(const Real& a);
Real cbrt(const Real& a);
Real exp(const Real& a);
Real log(const Real& a);
Real pow(const Real& base, long e);          // integer power
Real pow(const Real& base, const Real& e);   // exp(e * log base), base > 0
Real rootn(const Real& a, unsigned long n);  // n-th root, a >= 0
Real gamma(const Real& a);
Real floor(const Real& a);
Real round_half_away(const Real& a);
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);

// 2^{-bits/2} at the current working precision: the rank / comparison epsilon.
Real comparison_epsilon();
// 2^{-e} as a Real.
Real pow2(long e);
Real const_pi();
// Re-round a value to the current working precision.
Real to_working(const Real& a);

}  // namespace qhahn
