#include "qhahn/edge_scaling.hpp"

#include <cmath>

#include "qhahn/errors.hpp"
#include "qhahn/linalg.hpp"

namespace qhahn {

EnsembleParams ScalingParams::ensemble() const {
  EnsembleParams p;
  p.q = rootn(q0, static_cast<unsigned long>(N));
  p.N = N - 1;  // lattice {q^{-i} : i = 0..N-1}
  p.k = k();
  p.alpha = A();
  p.beta = B();
  return p;
}

Real bcoef(long x, const EnsembleParams& p) {
  return (Real(1) - pow(p.q, x - p.N)) * (Real(1) - p.alpha * pow(p.q, x + 1));
}

Real dcoef(long x, const EnsembleParams& p) {
  return p.alpha * p.beta * p.q * (Real(1) - pow(p.q, x)) *
         (Real(1) - pow(p.q, x - p.N - 1) / p.beta);
}

Real eigenvalue(long n, const EnsembleParams& p) {
  return pow(p.q, -n) * (Real(1) - pow(p.q, n)) * (Real(1) - p.alpha * p.beta * pow(p.q, n + 1));
}

std::vector<Real> apply_symmetrized(const std::vector<Real>& f, const EnsembleParams& p) {
  Lattice lat = build_lattice(p);
  std::vector<Real> out(f.size());
  for (long x = 0; x <= p.N; ++x) {
    Real B = bcoef(x, p), D = dcoef(x, p);
    Real acc = -(B + D) * f[static_cast<size_t>(x)];
    if (x < p.N)
      acc += B * sqrt(lat.weights[static_cast<size_t>(x)] / lat.weights[static_cast<size_t>(x + 1)]) *
             f[static_cast<size_t>(x + 1)];
    if (x > 0)
      acc += D * sqrt(lat.weights[static_cast<size_t>(x)] / lat.weights[static_cast<size_t>(x - 1)]) *
             f[static_cast<size_t>(x - 1)];
    out[static_cast<size_t>(x)] = acc;
  }
  return out;
}

Real eigen_relation_defect(const EnsembleParams& p, long n) {
  Lattice lat = build_lattice(p);
  OrthoBasis basis = build_basis(p, p.N + 1, n);
  std::vector<Real> f(static_cast<size_t>(p.N + 1));
  for (long x = 0; x <= p.N; ++x)
    f[static_cast<size_t>(x)] = sqrt(lat.weights[static_cast<size_t>(x)]) *
                                basis.values[static_cast<size_t>(n)][static_cast<size_t>(x)];
  std::vector<Real> g = apply_symmetrized(f, p);
  Real lam = eigenvalue(n, p);
  Real worst(0);
  for (long x = 0; x <= p.N; ++x) {
    Real scale = abs(lam * f[static_cast<size_t>(x)]) + abs(g[static_cast<size_t>(x)]) + Real(1);
    worst = max(worst, abs(g[static_cast<size_t>(x)] - lam * f[static_cast<size_t>(x)]) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Edge constants

namespace {

struct EdgeSymbol {
  Real q0, A, B, K, lam;

  Real Binf(const Real& Q) const { return (Real(1) - Q / q0) * (Real(1) - A * Q); }
  Real Dinf(const Real& Q) const { return A * B * (Real(1) - Q) * (Real(1) - Q / (B * q0)); }
  Real quart(const Real& Q) const {
    Real b = Binf(Q), d = Dinf(Q);
    Real s = b + d + lam;
    return s * s - 4 * b * d;
  }
  Real F(const Real& Q) const {
    Real b = Binf(Q), d = Dinf(Q);
    return 2 * sqrt(b * d) - b - d - lam;
  }
  Real Fxi(const Real& xi) const { return F(pow(q0, xi)); }
};

EdgeSymbol edge_symbol(const ScalingParams& sp) {
  EdgeSymbol e{sp.q0, sp.A(), sp.B(), sp.K(), Real(0)};
  e.lam = (Real(1) - e.K) * (Real(1) - e.A * e.B * e.K) / e.K;
  return e;
}

std::vector<Real> edge_roots(const ScalingParams& sp) {
  EdgeSymbol e = edge_symbol(sp);
  const long n = 40000;
  Real lo = pow2(-40), hi = Real(1) - pow2(-40);
  Real step = (hi - lo) / Real(n);
  std::vector<Real> roots;
  Real xp = lo, fp = e.quart(xp);
  for (long i = 1; i <= n; ++i) {
    Real x = lo + Real(i) * step;
    Real fx = e.quart(x);
    if ((fp.sign() < 0) != (fx.sign() < 0)) {
      Real aa = xp, bb = x, fa = fp;
      for (long it = 0; it < PrecisionContext::bits() + 16; ++it) {
        Real m = (aa + bb) / 2;
        Real fm = e.quart(m);
        if ((fa.sign() < 0) == (fm.sign() < 0)) { aa = m; fa = fm; } else { bb = m; }
      }
      Real root = (aa + bb) / 2;
      Real b = e.Binf(root), d = e.Dinf(root);
      if (b * d >= Real(0)) {
        Real fval = e.F(root);
        Real scale = abs(b) + abs(d) + abs(e.lam);
        if (abs(fval) <= pow2(-PrecisionContext::bits() / 4) * scale) roots.push_back(root);
      }
    }
    xp = x; fp = fx;
  }
  if (roots.size() < 2) throw NoRealEdge("edge equation lacks two real roots in (0,1)");
  return roots;
}

}  // namespace

Real compute_c1(const ScalingParams& sp, EdgeBranch branch) {
  std::vector<Real> roots = edge_roots(sp);
  Real lnq0 = log(sp.q0);
  Real hi_c1 = log(roots[0]) / lnq0, lo_c1 = hi_c1;
  for (const Real& p : roots) {
    Real c1 = log(p) / lnq0;
    hi_c1 = max(hi_c1, c1);
    lo_c1 = min(lo_c1, c1);
  }
  return branch == EdgeBranch::rightmost ? hi_c1 : lo_c1;
}

Real compute_c2(const ScalingParams& sp, EdgeBranch branch) {
  EdgeSymbol e = edge_symbol(sp);
  Real c1 = compute_c1(sp, branch);
  Real p = pow(sp.q0, c1);
  Real h = pow2(-PrecisionContext::bits() / 3);
  Real fprime = (e.Fxi(c1 + h) - e.Fxi(c1 - h)) / (2 * h);
  Real curv = sqrt(e.Binf(p) * e.Dinf(p));
  // Airy matching cubic: c2^3 (-F'(c1)) = sqrt(Binf Dinf)(p); bracket on (0,10)
  auto g = [&](const Real& c2) { return c2 * c2 * c2 * (-fprime) - curv; };
  Real lo(0), hi(10);
  if (!(g(lo) < Real(0) && g(hi) > Real(0)))
    throw ScalingFailure("matching cubic has no root in (0,10)");
  Real tol = Real(std::string("1e-12"));
  Real eps_extra = pow2(-PrecisionContext::bits() / 2);
  tol = min(tol, eps_extra * Real(1000000));
  while (hi - lo > tol) {
    Real m = (lo + hi) / 2;
    if (g(m) < Real(0)) lo = m; else hi = m;
  }
  return (lo + hi) / 2;
}

// ---------------------------------------------------------------------------
// Airy

namespace {

// Maclaurin pair under escalated precision; returns (Ai, Ai') at base precision.
std::pair<Real, Real> airy_series(const Real& x) {
  long base = PrecisionContext::bits();
  double xd = std::fabs(x.to_double());
  long extra = static_cast<long>(2.0 * std::pow(xd, 1.5)) + 64;
  Real ai, aip;
  {
    PrecisionContext::Guard guard(base + extra);
    Real xs = to_working(x);
    Real third = Real(1) / 3;
    Real c1 = Real(1) / (pow(Real(3), Real(2) * third) * gamma(Real(2) * third));
    Real c2 = -Real(1) / (pow(Real(3), third) * gamma(third));
    Real x3 = xs * xs * xs;
    // f   : t_{k+1} = t_k x^3/((3k+2)(3k+3)),   t_0 = 1
    // g   : s_{k+1} = s_k x^3/((3k+3)(3k+4)),   s_0 = x
    // f'  : F_{k+1} = F_k x^3/((3k)(3k+2)),     F_1 = x^2/2
    // g'  : G_{k+1} = G_k x^3/((3k+1)(3k+3)),   G_0 = 1
    Real t(1), s(xs), F = xs * xs / 2, G(1);
    Real sum_f = t, sum_g = s, sum_fp = F, sum_gp = G;
    Real tail = pow2(-(base + extra + 8));
    for (long k = 0; k < 1000000; ++k) {
      t = t * x3 / Real((3 * k + 2) * (3 * k + 3));
      s = s * x3 / Real((3 * k + 3) * (3 * k + 4));
      if (k >= 1) F = F * x3 / Real((3 * k) * (3 * k + 2));
      G = G * x3 / Real((3 * k + 1) * (3 * k + 3));
      sum_f += t;
      sum_g += s;
      if (k >= 1) sum_fp += F;
      sum_gp += G;
      Real bound = (abs(sum_f) + abs(sum_g) + abs(sum_fp) + abs(sum_gp) + Real(1)) * tail;
      if (abs(t) < bound && abs(s) < bound && abs(F) < bound && abs(G) < bound && k > 2) break;
    }
    ai = c1 * sum_f + c2 * sum_g;
    aip = c1 * sum_fp + c2 * sum_gp;
  }
  return {to_working(ai), to_working(aip)};
}

// Asymptotic expansion for x > 8; relative truncation floor ~ e^{-2 zeta}.
std::pair<Real, Real> airy_asymptotic(const Real& x) {
  long base = PrecisionContext::bits();
  Real ai, aip;
  {
    PrecisionContext::Guard guard(base + 64);
    Real xs = to_working(x);
    Real zeta = 2 * xs * sqrt(xs) / 3;
    Real zinv = Real(1) / zeta;
    Real uk(1), sgn(1);
    Real S(1), Sp(1);
    Real term(1);
    Real prev = abs(term) + Real(1);
    for (long k = 0; k < 10000; ++k) {
      Real num = Real(6 * k + 1) * Real(6 * k + 3) * Real(6 * k + 5);
      Real den = Real(216) * Real(k + 1) * Real(2 * k + 1);
      uk = uk * num / den;
      sgn = -sgn;
      Real t = sgn * uk * pow(zinv, k + 1);
      Real vk = -uk * Real(6 * (k + 1) + 1) / Real(6 * (k + 1) - 1);
      Real tp = sgn * vk * pow(zinv, k + 1);
      if (abs(t) >= prev) break;  // optimal truncation reached
      S += t;
      Sp += tp;
      prev = abs(t);
      if (abs(t) < pow2(-(base + 32)) * abs(S)) break;
    }
    Real pref = exp(-zeta) / (2 * sqrt(const_pi()));
    Real x14 = sqrt(sqrt(xs));
    ai = pref / x14 * S;
    aip = -pref * x14 * Sp;
  }
  return {to_working(ai), to_working(aip)};
}

std::pair<Real, Real> airy_pair(const Real& x) {
  if (abs(x) > Real(40)) throw DomainError("airy: |x| > 40");
  if (x > Real(8)) return airy_asymptotic(x);
  return airy_series(x);
}

}  // namespace

Real airy(const Real& x) { return airy_pair(x).first; }
Real airy_prime(const Real& x) { return airy_pair(x).second; }

// ---------------------------------------------------------------------------
// Gauss-Legendre and Tracy-Widom

void gauss_legendre_01(long m, std::vector<Real>* nodes, std::vector<Real>* weights) {
  nodes->assign(static_cast<size_t>(m), Real(0));
  weights->assign(static_cast<size_t>(m), Real(0));
  Real pi = const_pi();
  for (long i = 0; i < m; ++i) {
    // Newton on P_m over [-1,1] from the Chebyshev-angle initial guess
    Real x(std::cos(M_PI * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5)));
    Real pm, pm1;
    for (int it = 0; it < 200; ++it) {
      Real p0(1), p1 = x;
      for (long j = 2; j <= m; ++j) {
        Real p2 = (Real(2 * j - 1) * x * p1 - Real(j - 1) * p0) / Real(j);
        p0 = p1;
        p1 = p2;
      }
      pm = p1;
      pm1 = p0;
      Real dp = Real(m) * (x * pm - pm1) / (x * x - 1);
      Real dx = pm / dp;
      x -= dx;
      if (abs(dx) < pow2(-PrecisionContext::bits()) * (abs(x) + Real(1))) break;
    }
    Real p0(1), p1 = x;
    for (long j = 2; j <= m; ++j) {
      Real p2 = (Real(2 * j - 1) * x * p1 - Real(j - 1) * p0) / Real(j);
      p0 = p1;
      p1 = p2;
    }
    Real dp = Real(m) * (x * p1 - p0) / (x * x - 1);
    Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
    (*nodes)[static_cast<size_t>(i)] = (x + 1) / 2;
    (*weights)[static_cast<size_t>(i)] = w / 2;
  }
  (void)pi;
}

namespace {

Real tw_f2_single(const Real& u, long order) {
  std::vector<Real> xi, wt;
  gauss_legendre_01(order, &xi, &wt);
  std::vector<Real> xs, cs;  // nodes on (u, inf), sqrt(w J) factors
  for (long i = 0; i < order; ++i) {
    const Real& x0 = xi[static_cast<size_t>(i)];
    Real x = u + (Real(1) - x0) / x0;
    if (x > Real(40)) continue;  // kernel tail below 1e-140; drop the node
    xs.push_back(x);
    cs.push_back(sqrt(wt[static_cast<size_t>(i)]) / x0);
  }
  long n = static_cast<long>(xs.size());
  std::vector<Real> ai(static_cast<size_t>(n)), aip(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    ai[static_cast<size_t>(i)] = airy(xs[static_cast<size_t>(i)]);
    aip[static_cast<size_t>(i)] = airy_prime(xs[static_cast<size_t>(i)]);
  }
  MatrixHP M = MatrixHP::identity(n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      Real kij;
      if (i == j) {
        kij = aip[static_cast<size_t>(i)] * aip[static_cast<size_t>(i)] -
              xs[static_cast<size_t>(i)] * ai[static_cast<size_t>(i)] * ai[static_cast<size_t>(i)];
      } else {
        kij = (ai[static_cast<size_t>(i)] * aip[static_cast<size_t>(j)] -
               aip[static_cast<size_t>(i)] * ai[static_cast<size_t>(j)]) /
              (xs[static_cast<size_t>(i)] - xs[static_cast<size_t>(j)]);
      }
      M(i, j) -= cs[static_cast<size_t>(i)] * cs[static_cast<size_t>(j)] * kij;
    }
  return det(M);
}

}  // namespace

Real tw_f2_raw(const Real& u, long order) { return tw_f2_single(u, order); }

Real tw_f2(const Real& u, long order, bool check) {
  if (order < 20) throw QuadratureError("order must be >= 20");
  if (!check) return tw_f2_single(u, order);
  long m = order;
  Real coarse = tw_f2_single(u, m);
  for (int doubling = 0; doubling < 5; ++doubling) {
    Real fine = tw_f2_single(u, 2 * m);
    if (abs(fine - coarse) <= Real(std::string("1e-10"))) return fine;
    m *= 2;
    coarse = fine;
  }
  throw QuadratureError("Nystrom orders m and 2m disagree beyond 1e-10");
}

TWGrid build_tw_grid(const Real& umin, const Real& umax, long points, long order) {
  if (points < 2) throw DomainError("grid needs at least two points");
  TWGrid g;
  g.quadrature_order = order;
  Real h = pow2(-20);
  Real du = (umax - umin) / Real(points - 1);
  for (long i = 0; i < points; ++i) {
    Real u = umin + Real(i) * du;
    Real f = tw_f2(u, order, i == 0);  // inter-order check once per grid
    Real fp = (tw_f2_single(u + h, 2 * order) - tw_f2_single(u - h, 2 * order)) / (2 * h);
    g.u.push_back(u);
    g.F2.push_back(f);
    g.density.push_back(fp);
  }
  return g;
}

Real tw_mean(long order) {
  std::vector<Real> xi, wt;
  gauss_legendre_01(40, &xi, &wt);
  Real lo(-10), hi(6);
  Real span = hi - lo;
  Real h = pow2(-20);
  Real mean(0);
  for (size_t i = 0; i < xi.size(); ++i) {
    Real u = lo + span * xi[i];
    Real fp = (tw_f2_single(u + h, order) - tw_f2_single(u - h, order)) / (2 * h);
    mean += wt[i] * span * u * fp;
  }
  return mean;
}

// ---------------------------------------------------------------------------
// Density and convergence experiment

std::vector<std::pair<Real, Real>> scaled_density(const ScalingParams& sp,
                                                  const std::vector<Real>& ugrid) {
  EnsembleParams p = sp.ensemble();
  GapSequence seq = reconstruct_gaps(p);
  auto D = [&](long s) -> Real {
    if (s < p.k) return Real(0);
    if (s > p.N + 1) return Real(1);
    return seq.values[static_cast<size_t>(s - p.k)].second;
  };
  Real c1 = compute_c1(sp, EdgeBranch::rightmost);
  Real c2 = compute_c2(sp, EdgeBranch::rightmost);
  Real n13 = rootn(Real(sp.N), 3);
  std::vector<std::pair<Real, Real>> out;
  for (const Real& u : ugrid) {
    Real xreal = c1 * Real(sp.N) + c2 * u * n13;
    long s = floor(xreal).to_long();
    if (s < p.k) s = p.k;
    if (s > p.N) s = p.N;
    out.emplace_back(u, (D(s + 1) - D(s)) * c2 * n13);
  }
  return out;
}

ConvergenceResult convergence_experiment(const ScalingParams& family,
                                         const std::vector<long>& n_list, long tw_order) {
  ConvergenceResult res;
  res.tw_mean_val = tw_mean(tw_order);
  Real c1 = compute_c1(family, EdgeBranch::rightmost);
  Real c2 = compute_c2(family, EdgeBranch::rightmost);
  for (long N : n_list) {
    ScalingParams sp = family;
    sp.N = N;
    EnsembleParams p = sp.ensemble();
    GapSequence seq = reconstruct_gaps(p);
    auto D = [&](long s) -> Real {
      if (s < p.k) return Real(0);
      if (s > p.N + 1) return Real(1);
      return seq.values[static_cast<size_t>(s - p.k)].second;
    };
    Real n13 = rootn(Real(N), 3);
    Real mean(0);
    for (long s = p.k - 1; s <= p.N; ++s) {
      Real mass = D(s + 1) - D(s);
      Real u = (Real(s) - c1 * Real(N)) / (c2 * n13);
      mean += mass * u;
    }
    ConvergencePoint pt;
    pt.N = N;
    pt.mean_qh = mean;
    pt.logN = log(Real(N));
    Real err = abs(res.tw_mean_val - mean);
    if (err.is_zero()) err = pow2(-PrecisionContext::bits());
    pt.logErr = log(err);
    res.points.push_back(pt);
  }
  // least-squares slope
  Real sx(0), sy(0), sxx(0), sxy(0), n(static_cast<long>(res.points.size()));
  for (const auto& pt : res.points) {
    sx += pt.logN;
    sy += pt.logErr;
    sxx += pt.logN * pt.logN;
    sxy += pt.logN * pt.logErr;
  }
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return res;
}

}  // namespace qhahn
