#include "qhahn/painleve.hpp"

#include "qhahn/errors.hpp"

namespace qhahn {

namespace {

struct FixedParams {
  Real a3, a4, a5, a6, u, v, Q;
};

FixedParams fixed_params(const EnsembleParams& p) {
  return {pow(p.q, -p.N),
          pow(p.q, -p.N) / p.beta,
          p.alpha * p.q,
          p.q,
          pow(p.q, -p.k) / (p.alpha * p.beta),
          pow(p.q, p.k),
          Real(1) / p.q};
}

void guard(const Real& x, const Real& scale, const char* what) {
  if (abs(x) <= comparison_epsilon() * scale)
    throw SingularStep(std::string("vanishing pivot: ") + what);
}

// RHS of the r-advancing equation at the section with moving point c:
// c^2 (th-a3)(th-a4)(th-a5)(th-a6) / (a3 a4 a5 a6 (Q th - c)^2)
Real rhs_r(const FixedParams& f, const Real& c, const Real& th) {
  Real den_root = f.Q * th - c;
  guard(den_root, abs(f.Q * th) + abs(c), "(t/q - c)");
  return c * c * (th - f.a3) * (th - f.a4) * (th - f.a5) * (th - f.a6) /
         (f.a3 * f.a4 * f.a5 * f.a6 * den_root * den_root);
}

// RHS of the t-advancing equation:
// u v c^4 (r a3+1)(r a4+1)(r a5+1)(r a6+1) / ((r w - v c^2)(Q r w - u c^2))
Real rhs_t(const FixedParams& f, const Real& c, const Real& w, const Real& r) {
  Real d1 = r * w - f.v * c * c;
  Real d2 = f.Q * r * w - f.u * c * c;
  Real scale = abs(r * w) + abs(f.v * c * c) + abs(f.u * c * c);
  guard(d1, scale, "(r w - v c^2)");
  guard(d2, scale, "(r w/q - u c^2)");
  return f.u * f.v * pow(c, 4) * (r * f.a3 + 1) * (r * f.a4 + 1) * (r * f.a5 + 1) *
         (r * f.a6 + 1) / (d1 * d2);
}

}  // namespace

Real section_point(const EnsembleParams& p, long s) { return pow(p.q, -s + 1); }

Real section_wnum(const EnsembleParams& p, long s) {
  return -pow(p.q, -p.N - s + 2) / p.beta;
}

Real rho_weight(const Lattice& lat, long i, long k) {
  Real r = Real(1) / lat.weights[static_cast<size_t>(i)];
  for (long j = 0; j < k; ++j) {
    if (j == i) continue;
    Real d = lat.points[static_cast<size_t>(i)] - lat.points[static_cast<size_t>(j)];
    r /= d * d;
  }
  return r;
}

std::pair<Real, Real> initial_f1_f2(const EnsembleParams& p) {
  Lattice lat = build_lattice(p);
  FixedParams f = fixed_params(p);
  const Real a1 = section_point(p, p.k);
  const Real e1_odd = f.a3 + f.a5 + f.a6;
  const Real e1_even = a1 + a1 + f.a4;
  const Real pref1 = pow(p.q, -p.k + 1) / (p.alpha * p.beta);
  const Real pref2 = pow(p.q, p.k);
  Real f1(0), f2(0);
  for (long m = 0; m < p.k; ++m) {
    Real rm = rho_weight(lat, m, p.k);
    Real b1 = pow(p.q, -m + 1);
    Real b2 = pow(p.q, -m);
    f2 += rm * (pref1 - pref2);
    f1 += rm * (pref1 * (b1 - e1_odd) - pref2 * (b2 - e1_even));
  }
  return {f1, f2};
}

PainleveState initial_state(const EnsembleParams& p) {
  validate(p);
  auto [f1, f2] = initial_f1_f2(p);
  if (abs(f2) <= comparison_epsilon() * (abs(f1) + Real(1)))
    throw DegenerateInitialData("f2 vanishes; t_k undefined");
  PainleveState st;
  st.s = p.k;
  st.t = -f1 / f2;
  st.r = -p.beta * pow(p.q, p.N);
  st.w = section_wnum(p, p.k);
  return st;
}

PainleveState qpv_step_qhahn(const PainleveState& st, const EnsembleParams& p) {
  FixedParams f = fixed_params(p);
  const Real c = section_point(p, st.s + 1);
  const Real w = section_wnum(p, st.s + 1);
  const Real& th = st.t;
  const Real& rh = st.r;
  guard(th, Real(1), "t");
  Real b = rh * th + 1;
  guard(b, abs(rh * th) + Real(1), "(r t + 1)");
  Real r_next = (rhs_r(f, c, th) / b - 1) / th;
  Real b2 = r_next * th + 1;
  guard(b2, abs(r_next * th) + Real(1), "(r_next t + 1)");
  guard(r_next, Real(1), "r_next");
  Real t_next = (rhs_t(f, c, w, r_next) / b2 - 1) / r_next;
  PainleveState out;
  out.s = st.s + 1;
  out.t = t_next;
  out.r = r_next;
  out.w = w;
  return out;
}

std::pair<Real, Real> qpv_residuals(const PainleveState& st, const PainleveState& next,
                                    const EnsembleParams& p) {
  FixedParams f = fixed_params(p);
  const Real c = section_point(p, next.s);
  const Real w = next.w;
  // equation advancing r: (r_hat t_hat + 1)(r t_hat + 1) = rhs_r(t_hat)
  Real lhs1 = (st.r * st.t + 1) * (next.r * st.t + 1);
  Real rhs1 = rhs_r(f, c, st.t);
  // equation advancing t: (r t_hat + 1)(r t + 1) = rhs_t(r)
  Real lhs2 = (next.r * st.t + 1) * (next.r * next.t + 1);
  Real rhs2 = rhs_t(f, c, w, next.r);
  Real res1 = abs(lhs1 - rhs1) / (abs(lhs1) + abs(rhs1));
  Real res2 = abs(lhs2 - rhs2) / (abs(lhs2) + abs(rhs2));
  return {res1, res2};
}

std::pair<Real, Real> qpv_step_generic(const Real& t, const Real& r, const GenericQPVParams& gp) {
  const Real Q = Real(1) / gp.q;
  Real b = r * t + 1;
  if (abs(b) <= comparison_epsilon() * (abs(r * t) + Real(1)))
    throw SingularStep("(r t + 1) vanishes");
  Real d1 = r * gp.w - gp.v * gp.a1 * gp.a2;
  Real d2 = Q * r * gp.w - gp.u * gp.a1 * gp.a2;
  Real scale = abs(r * gp.w) + abs(gp.u * gp.a1 * gp.a2) + abs(gp.v * gp.a1 * gp.a2);
  if (abs(d1) <= comparison_epsilon() * scale || abs(d2) <= comparison_epsilon() * scale)
    throw SingularStep("rw-bracket vanishes");
  Real rhs1 = gp.u * gp.v * gp.a1 * gp.a1 * gp.a2 * gp.a2 * (r * gp.a3 + 1) * (r * gp.a4 + 1) *
              (r * gp.a5 + 1) * (r * gp.a6 + 1) / (d1 * d2);
  if (r.is_zero()) throw SingularStep("r vanishes");
  Real t_hat = (rhs1 / b - 1) / r;
  Real e1 = Q * t_hat - gp.a1;
  Real e2 = Q * t_hat - gp.a2;
  if (abs(e1) <= comparison_epsilon() * (abs(t_hat) + abs(gp.a1)) ||
      abs(e2) <= comparison_epsilon() * (abs(t_hat) + abs(gp.a2)))
    throw SingularStep("(t_hat/q - a) vanishes");
  Real rhs2 = gp.a1 * gp.a2 * (t_hat - gp.a3) * (t_hat - gp.a4) * (t_hat - gp.a5) *
              (t_hat - gp.a6) / (gp.a3 * gp.a4 * gp.a5 * gp.a6 * e1 * e2);
  Real b2 = r * t_hat + 1;
  if (abs(b2) <= comparison_epsilon() * (abs(r * t_hat) + Real(1)))
    throw SingularStep("(r t_hat + 1) vanishes");
  if (t_hat.is_zero()) throw SingularStep("t_hat vanishes");
  Real r_hat = (rhs2 / b2 - 1) / t_hat;
  return {t_hat, r_hat};
}

GenericQPVParams shift_params(const GenericQPVParams& gp) {
  GenericQPVParams out = gp;
  out.a1 = gp.q * gp.a1;
  out.a2 = gp.q * gp.a2;
  out.w = gp.q * gp.w;
  return out;
}

Real ratio_formula(const PainleveState& st_prev, const PainleveState& st, const EnsembleParams& p) {
  if (st_prev.s + 1 != st.s) throw DomainError("ratio_formula: states not consecutive");
  FixedParams f = fixed_params(p);
  const long s = st.s;
  const Real c = section_point(p, s);
  const Real w = st.w;
  Real tf = f.Q * st_prev.t - c;
  Real num = (f.Q * st_prev.r * w - f.v * c * c) * (f.Q * st.r * w - f.u * c * c) * tf * tf;
  Real den = f.u * f.v * (c - f.Q * f.a3) * (c - f.Q * f.a5) * (c - f.Q * f.a4) *
             (c - f.Q * f.a6) * c * c;
  if (den.is_zero()) throw SingularRatio("ratio denominator vanishes");
  return num / den;
}

Real dkk(const EnsembleParams& p) {
  validate(p);
  Lattice lat = build_lattice(p);
  OrthoBasis basis = build_basis(p, p.N + 1, p.k);
  Real Z = normalizer_Z(p, basis);
  Real v2(1);
  for (long i = 0; i < p.k; ++i)
    for (long j = i + 1; j < p.k; ++j) {
      Real d = lat.points[static_cast<size_t>(i)] - lat.points[static_cast<size_t>(j)];
      v2 *= d * d;
    }
  Real wprod(1);
  for (long l = 0; l < p.k; ++l) wprod *= lat.weights[static_cast<size_t>(l)];
  return v2 * wprod / Z;
}

Real dkk1(const EnsembleParams& p) {
  validate(p);
  Lattice lat = build_lattice(p);
  Real qk = rho_weight(lat, p.k, p.k);
  for (long m = 0; m < p.k; ++m) {
    Real d = lat.points[static_cast<size_t>(p.k)] - lat.points[static_cast<size_t>(m)];
    qk += rho_weight(lat, m, p.k) / (d * d);
  }
  Real prod2(1);
  for (long l = 0; l < p.k; ++l) {
    Real d = lat.points[static_cast<size_t>(p.k)] - lat.points[static_cast<size_t>(l)];
    prod2 *= d * d;
  }
  return lat.weights[static_cast<size_t>(p.k)] * qk * dkk(p) * prod2;
}

std::vector<PainleveState> qpv_trajectory(const EnsembleParams& p) {
  std::vector<PainleveState> states;
  states.push_back(initial_state(p));
  for (long s = p.k; s <= p.N; ++s) states.push_back(qpv_step_qhahn(states.back(), p));
  return states;
}

GapSequence reconstruct_gaps(const EnsembleParams& p) {
  GapSequence seq;
  seq.provenance = GapProvenance::recurrence;
  std::vector<PainleveState> states = qpv_trajectory(p);
  std::vector<Real> D(static_cast<size_t>(p.N + 2));
  D[static_cast<size_t>(p.k)] = dkk(p);
  if (p.k + 1 <= p.N + 1) D[static_cast<size_t>(p.k + 1)] = dkk1(p);
  for (long s = p.k + 2; s <= p.N + 1; ++s) {
    const PainleveState& prev = states[static_cast<size_t>(s - 1 - p.k)];
    const PainleveState& cur = states[static_cast<size_t>(s - p.k)];
    Real rat = ratio_formula(prev, cur, p);
    D[static_cast<size_t>(s)] = rat * D[static_cast<size_t>(s - 1)] * D[static_cast<size_t>(s - 1)] /
                                D[static_cast<size_t>(s - 2)];
  }
  for (long s = p.k; s <= p.N + 1; ++s)
    seq.values.emplace_back(s, D[static_cast<size_t>(s)]);
  return seq;
}

}  // namespace qhahn
