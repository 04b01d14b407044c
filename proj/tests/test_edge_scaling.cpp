#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qhahn/edge_scaling.hpp"
#include "qhahn/errors.hpp"

using namespace qhahn;

namespace {

ScalingParams family(double q0, double k0, double a, double b, long N) {
  ScalingParams sp;
  sp.q0 = Real(q0);
  sp.k0 = Real(k0);
  sp.a = Real(a);
  sp.b = Real(b);
  sp.N = N;
  return sp;
}

}  // namespace

TEST_CASE("difference operator: detailed balance and eigen-relation") {
  PrecisionContext::set_bits(256);
  EnsembleParams p;
  p.q = Real(std::string("0.5"));
  p.N = 8;
  p.k = 3;
  p.alpha = Real(std::string("0.5"));
  p.beta = Real(std::string("0.5"));
  Lattice lat = build_lattice(p);
  // symmetrizability: B(x) omega(x) = D(x+1) omega(x+1)
  for (long x = 0; x < p.N; ++x) {
    Real lhs = bcoef(x, p) * lat.weights[x];
    Real rhs = dcoef(x + 1, p) * lat.weights[x + 1];
    CHECK(abs(lhs - rhs) / (abs(lhs) + abs(rhs)) < comparison_epsilon());
  }
  // operator preserves the support: B(N) = 0, D(0) = 0
  CHECK(bcoef(p.N, p).is_zero());
  CHECK(dcoef(0, p).is_zero());
  // eigen-relation on sqrt(omega) P_n
  for (long n = 0; n <= p.k; ++n)
    CHECK(eigen_relation_defect(p, n) < Real(std::string("1e-20")));
}

TEST_CASE("scaling constants reproduce the reference families") {
  PrecisionContext::set_bits(256);
  // q0 = 0.99 family: k0 = 0.3 is the variant matching the published pair
  ScalingParams s99 = family(0.99, 0.3, -1.1, -1.3, 2000);
  Real c1 = compute_c1(s99, EdgeBranch::rightmost);
  Real c2 = compute_c2(s99, EdgeBranch::rightmost);
  CHECK(abs(c1 - Real(std::string("0.84839"))) < Real(std::string("1e-4")));
  CHECK(abs(c2 - Real(std::string("0.38999"))) < Real(std::string("1e-3")));

  // with k0 = 0.2 the same family lands elsewhere (documented resolution)
  ScalingParams s99b = family(0.99, 0.2, -1.1, -1.3, 2000);
  Real c1b = compute_c1(s99b, EdgeBranch::rightmost);
  CHECK(abs(c1b - Real(std::string("0.84839"))) > Real(std::string("1e-2")));

  ScalingParams s50 = family(0.5, 0.2, -1.1, -1.3, 1000);
  Real d1 = compute_c1(s50, EdgeBranch::rightmost);
  Real d2 = compute_c2(s50, EdgeBranch::rightmost);
  CHECK(abs(d1 - Real(std::string("0.69758"))) < Real(std::string("1e-4")));
  CHECK(abs(d2 - Real(std::string("0.47101"))) < Real(std::string("1e-3")));

  // both branches are edge roots; the leftmost sits below the rightmost
  Real left = compute_c1(s50, EdgeBranch::leftmost);
  CHECK(left < d1);
  // and both satisfy the quartic edge equation: re-derive via F at the root
  // (covered inside compute_c1; here just check distinctness)
  CHECK(abs(left - d1) > Real(std::string("0.1")));
}

TEST_CASE("airy: value at zero, recurrence anchors") {
  PrecisionContext::set_bits(256);
  Real third = Real(1) / 3;
  Real ai0 = Real(1) / (pow(Real(3), Real(2) * third) * gamma(Real(2) * third));
  CHECK(abs(airy(Real(0)) - ai0) < pow2(-250));
  // positive and decreasing on x > 0
  Real prev = airy(Real(0));
  for (int i = 1; i <= 12; ++i) {
    Real x = Real(i) / 2;
    Real v = airy(x);
    CHECK(v > Real(0));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("airy: ODE residual via central differences") {
  PrecisionContext::set_bits(256);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dx(-8.0, 8.0);
  Real h = Real(std::string("1e-15"));
  for (int i = 0; i < 20; ++i) {
    Real x(dx(rng));
    Real second = (airy(x + h) - 2 * airy(x) + airy(x - h)) / (h * h);
    CHECK(abs(second - x * airy(x)) < Real(std::string("1e-25")));
  }
}

TEST_CASE("airy: series and asymptotic branches agree at the crossover") {
  PrecisionContext::set_bits(320);
  // 8 < x: asymptotic; just below: series. Compare both at x = 12 by calling
  // the series through the public function at reflected precision.
  Real x(std::string("12.0"));
  Real a_asym = airy(x);
  // series route: evaluate via the ODE Taylor step from x = 7.5 is overkill;
  // instead check the Wronskian-free identity Ai''(x) = x Ai(x) with the
  // asymptotic branch itself
  Real h = Real(std::string("1e-12"));
  Real second = (airy(x + h) - 2 * a_asym + airy(x - h)) / (h * h);
  CHECK(abs(second - x * a_asym) / abs(x * a_asym) < Real(std::string("1e-15")));
  // derivative consistency: (Ai(x+h)-Ai(x-h))/2h ~ Ai'(x)
  Real fd = (airy(x + h) - airy(x - h)) / (2 * h);
  CHECK(abs(fd - airy_prime(x)) / abs(fd) < Real(std::string("1e-15")));
  CHECK_THROWS_AS(airy(Real(41)), DomainError);
}

TEST_CASE("tracy-widom: limits, monotonicity, mean") {
  PrecisionContext::set_bits(256);
  Real one_limit = tw_f2(Real(10), 40, false);
  CHECK(one_limit > Real(1) - Real(std::string("1e-8")));
  CHECK(one_limit <= Real(1) + Real(std::string("1e-12")));

  // inter-order agreement and monotonicity on a short grid
  Real prev(-1);
  for (int i = 0; i <= 10; ++i) {
    Real u = Real(-6) + Real(i);
    Real f = tw_f2(u, 30);
    CHECK(f > prev);
    prev = f;
  }

  Real mean = tw_mean(60);
  CHECK(abs(mean - Real(std::string("-1.7711"))) < Real(std::string("1e-3")));
}

TEST_CASE("scaled density: mass and positivity at desk scale") {
  PrecisionContext::set_bits(512);
  ScalingParams sp = family(0.99, 0.2, -1.1, -1.3, 60);
  EnsembleParams p = sp.ensemble();
  GapSequence seq = reconstruct_gaps(p);
  // telescoping mass
  Real mass = seq.values.back().second - seq.values.front().second + dkk(p) - Real(0);
  // simpler: D(N+1) - D(k-1) = 1 - 0
  CHECK(abs(seq.values.back().second - Real(1)) < Real(std::string("1e-25")));
  std::vector<Real> ugrid;
  for (int i = -30; i <= 15; ++i) ugrid.push_back(Real(i) / 5);
  auto dens = scaled_density(sp, ugrid);
  for (const auto& [u, v] : dens) CHECK(v >= Real(0));
  (void)mass;
}

TEST_CASE("convergence experiment: negative slope, subsample stability") {
  PrecisionContext::set_bits(512);
  ScalingParams sp = family(0.99, 0.3, -1.1, -1.3, 0);
  std::vector<long> ns;
  for (long n = 10; n <= 100; n += 10) ns.push_back(n);
  ConvergenceResult res = convergence_experiment(sp, ns, 40);
  CHECK(res.slope < Real(0));
  std::vector<long> half;
  for (size_t i = 0; i < ns.size(); i += 2) half.push_back(ns[i]);
  ConvergenceResult res2 = convergence_experiment(sp, half, 40);
  CHECK(res2.slope < Real(0));
}
