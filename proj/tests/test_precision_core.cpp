#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qhahn/errors.hpp"
#include "qhahn/linalg.hpp"
#include "qhahn/poly.hpp"
#include "qhahn/real.hpp"

using namespace qhahn;

TEST_CASE("real arithmetic basics") {
  PrecisionContext::set_bits(256);
  Real a(3), b(7);
  CHECK((a + b).to_double() == doctest::Approx(10.0));
  CHECK(abs(a / b * b - a) < pow2(-250));
  CHECK(Real("0.5").to_double() == 0.5);
  CHECK_THROWS_AS(Real(1) / Real(0), PrecisionOverflow);
  CHECK_THROWS_AS(log(Real(-1)), DomainError);
}

TEST_CASE("precision context guard") {
  PrecisionContext::set_bits(256);
  {
    PrecisionContext::Guard g(512);
    CHECK(PrecisionContext::bits() == 512);
  }
  CHECK(PrecisionContext::bits() == 256);
  CHECK_THROWS_AS(PrecisionContext::set_bits(32), DomainError);
}

TEST_CASE("determinant identity cases") {
  PrecisionContext::set_bits(256);
  MatrixHP m1(1, 1);
  m1(0, 0) = Real(std::string("2.5"));
  CHECK(det(m1).to_double() == doctest::Approx(2.5));

  MatrixHP id = MatrixHP::identity(3);
  CHECK(det(id).to_double() == doctest::Approx(1.0));

  MatrixHP m2(2, 2);
  m2(0, 0) = Real(1); m2(0, 1) = Real(2);
  m2(1, 0) = Real(3); m2(1, 1) = Real(4);
  CHECK(abs(det(m2) + Real(2)) < pow2(-200));

  MatrixHP empty(0, 0);
  CHECK(det(empty).to_double() == doctest::Approx(1.0));
}

TEST_CASE("det multiplicativity on random 5x5") {
  PrecisionContext::set_bits(256);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    MatrixHP A(5, 5), B(5, 5), C(5, 5);
    for (long i = 0; i < 5; ++i)
      for (long j = 0; j < 5; ++j) {
        A(i, j) = Real(dist(rng)) + (i == j ? Real(3) : Real(0));
        B(i, j) = Real(dist(rng)) + (i == j ? Real(3) : Real(0));
      }
    for (long i = 0; i < 5; ++i)
      for (long j = 0; j < 5; ++j) {
        Real s(0);
        for (long l = 0; l < 5; ++l) s += A(i, l) * B(l, j);
        C(i, j) = s;
      }
    Real lhs = det(C), rhs = det(A) * det(B);
    CHECK(abs(lhs - rhs) / abs(rhs) < comparison_epsilon());
  }
}

TEST_CASE("null_vector_2x2") {
  PrecisionContext::set_bits(256);
  MatrixHP m(2, 2);
  m(0, 0) = Real(0); m(0, 1) = Real(0);
  m(1, 0) = Real(0); m(1, 1) = Real(1);
  Vec2 v = null_vector_2x2(m);
  CHECK(abs(v[0] - Real(1)) < comparison_epsilon());
  CHECK(abs(v[1]) < comparison_epsilon());

  MatrixHP ones(2, 2);
  for (long i = 0; i < 2; ++i)
    for (long j = 0; j < 2; ++j) ones(i, j) = Real(1);
  Vec2 w = null_vector_2x2(ones);
  CHECK(abs(w[0] + w[1]) < comparison_epsilon());  // (1,-1) direction

  CHECK_THROWS_AS(null_vector_2x2(MatrixHP::identity(2)), NotSingular);
  MatrixHP zero(2, 2);
  CHECK_THROWS_AS(null_vector_2x2(zero), RankZero);
}

TEST_CASE("rank1_residue_direction") {
  PrecisionContext::set_bits(256);
  MatrixHP m(2, 2);
  m(0, 0) = Real(2); m(0, 1) = Real(4);
  m(1, 0) = Real(1); m(1, 1) = Real(2);
  Vec2 v = rank1_residue_direction(m);
  // columns proportional to (2,1): normalized largest entry 1
  CHECK(abs(v[0] - Real(1)) < comparison_epsilon());
  CHECK(abs(v[1] - Real(std::string("0.5"))) < comparison_epsilon());

  MatrixHP d(2, 2);
  d(1, 1) = Real(3);
  Vec2 w = rank1_residue_direction(d);
  CHECK(abs(w[0]) < comparison_epsilon());
  CHECK(abs(w[1] - Real(1)) < comparison_epsilon());

  CHECK_THROWS_AS(rank1_residue_direction(MatrixHP::identity(2)), NotSingular);
}

TEST_CASE("poly division and derivative") {
  PrecisionContext::set_bits(128);
  // (z-2)(z+3) = z^2 + z - 6
  Poly p{Real(-6), Real(1), Real(1)};
  Real rem;
  Poly q = poly_divide_linear(p, Real(2), &rem);
  CHECK(abs(rem) < pow2(-100));
  CHECK(abs(q[0] - Real(3)) < pow2(-100));
  CHECK(abs(q[1] - Real(1)) < pow2(-100));
  Poly dp = poly_derivative(p);
  CHECK(abs(poly_eval(dp, Real(5)) - Real(11)) < pow2(-100));
}

TEST_CASE("precision doubling agrees on a pipeline") {
  // determinant of a structured matrix computed at 256 and 512 bits agrees
  // in the leading 128 bits
  auto run = [](long bits) {
    PrecisionContext::Guard g(bits);
    MatrixHP m(4, 4);
    for (long i = 0; i < 4; ++i)
      for (long j = 0; j < 4; ++j)
        m(i, j) = Real(1) / Real(i + j + 1);
    return to_working(det(m));
  };
  PrecisionContext::set_bits(512);
  Real d256 = run(256), d512 = run(512);
  CHECK(abs(d256 - d512) / abs(d512) < pow2(-128));
}
