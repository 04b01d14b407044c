#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qhahn/ensemble.hpp"
#include "qhahn/errors.hpp"

using namespace qhahn;

namespace {

EnsembleParams make(double q, long N, long k, double alpha, double beta) {
  EnsembleParams p;
  p.q = Real(q);
  p.N = N;
  p.k = k;
  p.alpha = Real(alpha);
  p.beta = Real(beta);
  return p;
}

}  // namespace

TEST_CASE("qpochhammer") {
  PrecisionContext::set_bits(256);
  Real q(std::string("0.5"));
  CHECK(qpochhammer(Real(std::string("0.3")), q, 0).to_double() == doctest::Approx(1.0));
  CHECK(qpochhammer(q, q, 1).to_double() == doctest::Approx(0.5));
  // (0.5; 0.5)_2 = (1 - 0.5)(1 - 0.25) = 0.375
  CHECK(qpochhammer(q, q, 2).to_double() == doctest::Approx(0.375));
}

TEST_CASE("weight values and positivity") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.5, 4, 2, 0.5, 0.5);
  CHECK(weight(0, p).to_double() == doctest::Approx(1.0));
  // x = 1: (alpha beta q)^{-1}(1-alpha q)(1-q^{-N}) / ((1-q)(1-beta^{-1}q^{-N}))
  double expect = 8.0 * (1 - 0.25) * (1 - 16.0) / ((1 - 0.5) * (1 - 32.0));
  CHECK(weight(1, p).to_double() == doctest::Approx(expect));
  for (long x = 0; x <= p.N; ++x) CHECK(weight(x, p) > Real(0));
  validate(p);

  // alpha outside both ranges
  EnsembleParams bad = make(0.5, 4, 2, 3.0, 0.5);
  CHECK_THROWS_AS(validate(bad), InadmissibleParams);
  // the second admissible window: alpha, beta > q^{-N}
  EnsembleParams high = make(0.5, 4, 2, 20.0, 24.0);
  validate(high);
}

TEST_CASE("basis: P0, P1, orthogonality") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.5, 4, 2, 0.5, 0.5);
  Lattice lat = build_lattice(p);
  OrthoBasis b = build_basis(p, 5, 2);

  Real wsum(0), ysum(0);
  for (long x = 0; x < 5; ++x) {
    wsum += lat.weights[x];
    ysum += lat.points[x] * lat.weights[x];
  }
  CHECK(abs(b.norms[0] - wsum) / wsum < comparison_epsilon());
  // P1(y) = y - <y>: monic coefficients
  CHECK(abs(b.monic[1][1] - Real(1)) < comparison_epsilon());
  CHECK(abs(b.monic[1][0] + ysum / wsum) / (ysum / wsum) < comparison_epsilon());

  // Gram matrix diagonal to eps
  for (long i = 0; i <= 2; ++i)
    for (long j = 0; j <= 2; ++j) {
      Real g(0);
      for (long x = 0; x < 5; ++x)
        g += b.values[i][x] * b.values[j][x] * lat.weights[x];
      if (i != j)
        CHECK(abs(g) <= comparison_epsilon() * sqrt(b.norms[i] * b.norms[j]));
      else
        CHECK(g > Real(0));
    }

  // Newton evaluation agrees with monic power form at an off-support point
  Real z(std::string("3.7"));
  for (long j = 0; j <= 2; ++j)
    CHECK(abs(b.eval(j, z) - poly_eval(b.monic[j], z)) <=
          comparison_epsilon() * (abs(b.eval(j, z)) + Real(1)));

  CHECK_THROWS_AS(build_basis(p, 2, 2), DegenerateSupport);
}

TEST_CASE("normalizer Z equals brute-force subset sum") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.5, 4, 2, 0.5, 0.5);
  OrthoBasis b = build_basis(p, p.N + 1, p.k);
  Real Z = normalizer_Z(p, b);
  CHECK(abs(Z - b.norms[0] * b.norms[1]) / Z < comparison_epsilon());

  // brute force: sum over all k-subsets of the full lattice
  Lattice lat = build_lattice(p);
  Real direct(0);
  for (long x1 = 0; x1 <= p.N; ++x1)
    for (long x2 = x1 + 1; x2 <= p.N; ++x2) {
      Real d = lat.points[x1] - lat.points[x2];
      direct += d * d * lat.weights[x1] * lat.weights[x2];
    }
  CHECK(abs(Z - direct) / Z < pow2(-200));
}

TEST_CASE("kernel: projection property and symmetry") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.5, 6, 2, 0.5, 0.5);
  Lattice lat = build_lattice(p);
  OrthoBasis b = build_basis(p, p.N + 1, p.k);
  MatrixHP K = kernel_matrix(p, lat, b, 0);

  Real tr(0);
  for (long i = 0; i < K.rows; ++i) tr += K(i, i);
  CHECK(abs(tr - Real(p.k)) < comparison_epsilon() * Real(p.k));

  Real worst(0);
  for (long i = 0; i < K.rows; ++i)
    for (long j = 0; j < K.cols; ++j) {
      Real acc(0);
      for (long l = 0; l < K.rows; ++l) acc += K(i, l) * K(l, j);
      worst = max(worst, abs(acc - K(i, j)));
      worst = max(worst, abs(K(i, j) - K(j, i)));
    }
  CHECK(worst < comparison_epsilon());
}

TEST_CASE("gap boundary conventions") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.5, 6, 2, 0.5, 0.5);
  CHECK(gap_direct(p, p.N + 1).to_double() == doctest::Approx(1.0));
  CHECK(gap_direct(p, 1).to_double() == doctest::Approx(0.0));
  CHECK(gap_bruteforce(p, p.N + 1).to_double() == doctest::Approx(1.0));
  CHECK(gap_bruteforce(p, 1).to_double() == doctest::Approx(0.0));

  // k = 1: D_1(s) is the normalized partial weight sum
  EnsembleParams p1 = make(0.5, 5, 1, 0.5, 0.5);
  Lattice lat = build_lattice(p1);
  Real tot(0), part(0);
  for (long x = 0; x <= 5; ++x) tot += lat.weights[x];
  for (long x = 0; x < 3; ++x) part += lat.weights[x];
  Real d = gap_direct(p1, 3);
  CHECK(abs(d - part / tot) / d < comparison_epsilon());
}

TEST_CASE("oracle equivalence direct vs bruteforce") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.5, 6, 2, 0.5, 0.5);
  for (long s = p.k; s <= p.N + 1; ++s) {
    Real a = gap_direct(p, s);
    Real b = gap_bruteforce(p, s);
    CHECK(abs(a - b) / b < Real(std::string("1e-30")));
  }
  // monotone nondecreasing
  Real prev(0);
  for (long s = p.k; s <= p.N + 1; ++s) {
    Real d = gap_direct(p, s);
    CHECK(d >= prev);
    prev = d;
  }
}

TEST_CASE("precision doubling of gap_direct") {
  EnsembleParams p = make(0.7, 8, 3, 0.5, 0.5);
  Real a, b;
  {
    PrecisionContext::Guard g(256);
    a = gap_direct(p, 5);
  }
  PrecisionContext::set_bits(512);
  b = gap_direct(p, 5);
  CHECK(abs(to_working(a) - b) / abs(b) < pow2(-128));
}

TEST_CASE("bruteforce guard") {
  PrecisionContext::set_bits(256);
  EnsembleParams p = make(0.99, 60, 25, 2.0, 2.1);
  CHECK_THROWS_AS(gap_bruteforce(p, 30), TooLarge);
}
