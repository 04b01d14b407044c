#include "qhahn/qconnection.hpp"

#include "qhahn/errors.hpp"
#include "qhahn/painleve.hpp"

namespace qhahn {

namespace {

using PolyMat = std::array<std::array<Poly, 2>, 2>;

PolyMat pm_mul(const PolyMat& A, const PolyMat& B) {
  PolyMat r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = poly_add(poly_mul(A[i][0], B[0][j]), poly_mul(A[i][1], B[1][j]));
  return r;
}

Poly pm_det(const PolyMat& A) {
  return poly_add(poly_mul(A[0][0], A[1][1]), poly_scale(poly_mul(A[0][1], A[1][0]), Real(-1)));
}

// Factor a rank-1 2x2 matrix as p r^T with p the dominant column.
void rank1_factor(const MatrixHP& M, Vec2* p, Vec2* r) {
  Vec2 c0{M(0, 0), M(1, 0)}, c1{M(0, 1), M(1, 1)};
  *p = (max(abs(c0[0]), abs(c0[1])) >= max(abs(c1[0]), abs(c1[1]))) ? c0 : c1;
  Real nn = (*p)[0] * (*p)[0] + (*p)[1] * (*p)[1];
  (*r)[0] = ((*p)[0] * M(0, 0) + (*p)[1] * M(1, 0)) / nn;
  (*r)[1] = ((*p)[0] * M(0, 1) + (*p)[1] * M(1, 1)) / nn;
}

MatrixHP transpose2(const MatrixHP& m) {
  MatrixHP t(2, 2);
  t(0, 0) = m(0, 0); t(0, 1) = m(1, 0); t(1, 0) = m(0, 1); t(1, 1) = m(1, 1);
  return t;
}

MatrixHP inv2(const MatrixHP& m) {
  Real d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (d.is_zero()) throw NotSingular("2x2 inverse of singular matrix");
  MatrixHP r(2, 2);
  r(0, 0) = m(1, 1) / d; r(0, 1) = -m(0, 1) / d;
  r(1, 0) = -m(1, 0) / d; r(1, 1) = m(0, 0) / d;
  return r;
}

MatrixHP mul2(const MatrixHP& a, const MatrixHP& b) {
  MatrixHP r(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

void refresh_vectors(ConnectionState& cs) {
  // At the top section the moving point can collide with a fixed zero and the
  // numerator vanishes to second order; the coordinates stay well defined,
  // only the vector bookkeeping degenerates. Record zero vectors then.
  try {
    cs.kernel_vec = null_vector_2x2(cs.matrix.eval_num(cs.a1));
    cs.residue_vec = rank1_residue_direction(transpose2(cs.matrix.eval_num(cs.a2)));
  } catch (const Error&) {
    cs.kernel_vec = {Real(0), Real(0)};
    cs.residue_vec = {Real(0), Real(0)};
  }
}

// Divide every entry of P by (z - root) twice (roots r1, r2), enforcing small
// remainders.
PolyMat divide_out(const PolyMat& P, const Real& r1, const Real& r2, const Real& extra_scale) {
  PolyMat out;
  Real eps = comparison_epsilon();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Real scale = (poly_max_abs(P[i][j]) + Real(1)) * extra_scale;
      Real rem1, rem2;
      Poly q1 = poly_divide_linear(P[i][j], r1, &rem1);
      Poly q2 = poly_divide_linear(q1, r2, &rem2);
      if (abs(rem1) > eps * scale || abs(rem2) > eps * scale)
        throw CancellationFailure("removable singularity did not cancel");
      out[i][j] = poly_trim(std::move(q2), eps);
    }
  return out;
}

Real delta_split_ratio(const ConnectionState& after);

}  // namespace

MatrixHP RationalMatrix2::eval(const Real& z) const {
  Real d = poly_eval(den, z);
  if (d.is_zero()) throw SingularRatio("evaluation at a pole");
  MatrixHP m(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = poly_eval(num[i][j], z) / d;
  return m;
}

MatrixHP RationalMatrix2::eval_num(const Real& z) const {
  MatrixHP m(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = poly_eval(num[i][j], z);
  return m;
}

bool ConnectionState::coincident() const {
  return abs(a1 - a2) <= comparison_epsilon() * (abs(a1) + abs(a2));
}

Real det_defect(const ConnectionState& cs, const Real& z) {
  Poly d = pm_det(cs.matrix.num);
  Real ref = cs.u * cs.v;
  for (const Real* a : {&cs.a1, &cs.a2, &cs.a3, &cs.a4, &cs.a5, &cs.a6}) ref *= (z - *a);
  return abs(poly_eval(d, z) - ref) / abs(ref);
}

RationalMatrix2 build_A0(const EnsembleParams& p) {
  const Real qmN = pow(p.q, -p.N);
  RationalMatrix2 m;
  m.den = poly_scale(poly_from_roots({p.q, qmN / p.beta}), p.alpha * p.beta);
  m.num[0][0] = poly_from_roots({p.alpha * p.q, qmN});
  m.num[0][1] = Poly{Real(0)};
  m.num[1][0] = Poly{Real(0)};
  m.num[1][1] = m.den;
  return m;
}

ConnectionState build_Ak(const EnsembleParams& p) {
  validate(p);
  ConnectionState cs;
  cs.q = p.q;
  cs.a1 = section_point(p, p.k);
  cs.a2 = cs.a1;
  cs.a3 = pow(p.q, -p.N);
  cs.a4 = cs.a3 / p.beta;
  cs.a5 = p.alpha * p.q;
  cs.a6 = p.q;
  cs.u = pow(p.q, -p.k) / (p.alpha * p.beta);
  cs.v = pow(p.q, p.k);
  cs.matrix.den = poly_from_roots({cs.a2, cs.a4, cs.a6});
  cs.matrix.num[0][0] = poly_scale(poly_from_roots({cs.a5, cs.a3, cs.a6}), cs.u);
  cs.matrix.num[0][1] = Poly{Real(0)};
  cs.matrix.num[1][1] = poly_scale(poly_from_roots({cs.a1, cs.a1, cs.a4}), cs.v);
  auto [f1, f2] = initial_f1_f2(p);
  cs.matrix.num[1][0] = Poly{Real(0), f1, f2};
  cs.w = cs.matrix.num[0][0][0];
  cs.step_index = 0;
  refresh_vectors(cs);
  return cs;
}

namespace {

// Riemann-Hilbert solution row data at the section: values of P_k, c P_{k-1}
// on the support and a Newton-form evaluator.
struct SectionPolys {
  std::vector<Real> pk_vals, pkm1_vals;
  OrthoBasis basis_k;    // used when s > k
  OrthoBasis basis_km1;  // used when s == k
  bool degenerate = false;
  long s = 0, k = 0;
  Real c;

  Real eval_pk(const Real& z, const std::vector<Real>& nodes) const {
    if (!degenerate) return basis_k.eval(k, z);
    Real r(1);
    for (long i = 0; i < s; ++i) r *= (z - nodes[static_cast<size_t>(i)]);
    return r;
  }
  Real eval_pkm1(const Real& z) const {
    return degenerate ? basis_km1.eval(k - 1, z) : basis_k.eval(k - 1, z);
  }
};

MatrixHP eval_Ms(const EnsembleParams& p, const Lattice& lat, const SectionPolys& sp,
                 const Real& z) {
  MatrixHP m(2, 2);
  m(0, 0) = sp.eval_pk(z, lat.points);
  m(1, 0) = sp.c * sp.eval_pkm1(z);
  Real s01(0), s11(0);
  for (long x = 0; x < sp.s; ++x) {
    Real d = z - lat.points[static_cast<size_t>(x)];
    s01 += sp.pk_vals[static_cast<size_t>(x)] * lat.weights[static_cast<size_t>(x)] / d;
    s11 += sp.c * sp.pkm1_vals[static_cast<size_t>(x)] * lat.weights[static_cast<size_t>(x)] / d;
  }
  m(0, 1) = s01;
  m(1, 1) = s11;
  return m;
}

}  // namespace

ConnectionState section_connection(const EnsembleParams& p, long s) {
  validate(p);
  if (s < p.k || s > p.N + 1) throw DegenerateSupport("section outside k..N+1");
  Lattice lat = build_lattice(p);
  SectionPolys sp;
  sp.s = s;
  sp.k = p.k;
  if (s == p.k) {
    sp.degenerate = true;
    sp.basis_km1 = build_basis(p, s, p.k - 1);
    sp.c = Real(1) / sp.basis_km1.norms[static_cast<size_t>(p.k - 1)];
    sp.pk_vals.assign(static_cast<size_t>(s), Real(0));
    sp.pkm1_vals = sp.basis_km1.values[static_cast<size_t>(p.k - 1)];
  } else {
    sp.basis_k = build_basis(p, s, p.k);
    sp.c = Real(1) / sp.basis_k.norms[static_cast<size_t>(p.k - 1)];
    sp.pk_vals = sp.basis_k.values[static_cast<size_t>(p.k)];
    sp.pkm1_vals = sp.basis_k.values[static_cast<size_t>(p.k - 1)];
  }

  RationalMatrix2 A0 = build_A0(p);
  ConnectionState cs;
  cs.q = p.q;
  cs.a1 = section_point(p, s);
  cs.a2 = cs.a1;
  cs.a3 = pow(p.q, -p.N);
  cs.a4 = cs.a3 / p.beta;
  cs.a5 = p.alpha * p.q;
  cs.a6 = p.q;
  cs.u = pow(p.q, -p.k) / (p.alpha * p.beta);
  cs.v = pow(p.q, p.k);
  cs.matrix.den = poly_from_roots({cs.a2, cs.a4, cs.a6});
  cs.step_index = s - p.k;

  // Numerators are cubic: fit from four samples of A_s(z) den(z) at negative
  // z (all singularities are positive).
  std::vector<Real> zs{Real(std::string("-1.375")), Real(std::string("-2.625")),
                       Real(std::string("-3.875")), Real(std::string("-5.125"))};
  MatrixHP V(4, 4);
  std::array<std::array<std::vector<Real>, 2>, 2> samples;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) samples[i][j].resize(4);
  for (int si = 0; si < 4; ++si) {
    const Real& z = zs[static_cast<size_t>(si)];
    MatrixHP Ms = eval_Ms(p, lat, sp, z / p.q);
    MatrixHP A0v(2, 2);
    Real d0 = poly_eval(A0.den, z);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) A0v(i, j) = poly_eval(A0.num[i][j], z) / d0;
    MatrixHP As = mul2(mul2(Ms, A0v), inv2(eval_Ms(p, lat, sp, z)));
    Real dz = poly_eval(cs.matrix.den, z);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) samples[i][j][static_cast<size_t>(si)] = As(i, j) * dz;
    Real pw(1);
    for (int c = 0; c < 4; ++c) { V(si, c) = pw; pw *= z; }
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::vector<Real> coef = solve(V, samples[i][j]);
      cs.matrix.num[i][j] = poly_trim(Poly(coef.begin(), coef.end()), comparison_epsilon());
    }
  cs.w = cs.matrix.num[0][0][0];
  refresh_vectors(cs);
  return cs;
}

std::pair<Real, Real> extract_coordinates(const ConnectionState& cs) {
  const Poly& n21 = cs.matrix.num[1][0];
  if (n21.size() < 3 || abs(n21[2]) <= comparison_epsilon() * poly_max_abs(n21))
    throw CoordinateAtInfinity("lower-left numerator not quadratic; t at infinity");
  Real scale = poly_max_abs(n21);
  if (abs(n21[0]) > comparison_epsilon() * scale)
    throw CancellationFailure("lower-left numerator lost its root at 0");
  Real t = -n21[1] / n21[2];
  Real n11t = poly_eval(cs.matrix.num[0][0], t);
  if (n11t.is_zero()) throw CoordinateAtInfinity("a11(t) vanishes");
  Real prod = (t - cs.a3) * (t - cs.a4) * (t - cs.a5) * (t - cs.a6);
  Real r = cs.w * prod / (n11t * cs.a3 * cs.a4 * cs.a5 * cs.a6 * t) - Real(1) / t;
  return {t, r};
}

ConnectionState modification_step(const ConnectionState& cs) {
  const Real& q = cs.q;
  PolyMat L, Rt;
  if (cs.coincident()) {
    const Real c = cs.a1;
    Vec2 pvec, rvec;
    MatrixHP Nc = cs.matrix.eval_num(c);
    rank1_factor(Nc, &pvec, &rvec);
    Vec2 jp = rot90(pvec);
    MatrixHP Ndc(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        Ndc(i, j) = poly_eval(poly_derivative(cs.matrix.num[i][j]), c);
    Vec2 x{jp[0] * Ndc(0, 0) + jp[1] * Ndc(1, 0), jp[0] * Ndc(0, 1) + jp[1] * Ndc(1, 1)};
    int i0 = abs(rvec[0]) > abs(rvec[1]) ? 0 : 1;
    Real mu = x[static_cast<size_t>(i0)] / rvec[static_cast<size_t>(i0)];
    Real other = abs(x[static_cast<size_t>(1 - i0)] - mu * rvec[static_cast<size_t>(1 - i0)]);
    if (other > comparison_epsilon() * (abs(x[0]) + abs(x[1]) + Real(1)) * pow2(16))
      throw CancellationFailure("residue structure not proportional at the double point");
    // R0 = -p (Jp)^T / (q mu), nilpotent
    std::array<std::array<Real, 2>, 2> R0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) R0[i][j] = -pvec[static_cast<size_t>(i)] * jp[static_cast<size_t>(j)] / (q * mu);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        L[i][j] = i == j ? Poly{q * R0[i][j] - c, Real(1)} : Poly{q * R0[i][j]};
        Rt[i][j] = i == j ? Poly{-R0[i][j] - c / q, Real(1)} : Poly{-R0[i][j]};
      }
  } else {
    // distinct zero/pole moving down by 1/q
    Vec2 col_zero = rank1_residue_direction(cs.matrix.eval_num(cs.a1));
    Vec2 uvec = rot90(col_zero);
    Vec2 ptil = rank1_residue_direction(cs.matrix.eval_num(cs.a2));
    Real ip = dot(uvec, ptil);
    if (abs(ip) <= comparison_epsilon() * (abs(ptil[0]) + abs(ptil[1])))
      throw NonGenericConnection("pairing <u, p> vanishes in the up-step");
    Real f = (cs.a1 - cs.a2) / (q * ip);
    std::array<std::array<Real, 2>, 2> R0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) R0[i][j] = f * ptil[static_cast<size_t>(i)] * uvec[static_cast<size_t>(j)];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        L[i][j] = i == j ? Poly{q * R0[i][j] - cs.a1, Real(1)} : Poly{q * R0[i][j]};
        Rt[i][j] = i == j ? Poly{-R0[i][j] - cs.a2 / q, Real(1)} : Poly{-R0[i][j]};
      }
  }
  PolyMat P = pm_mul(pm_mul(L, cs.matrix.num), Rt);
  PolyMat Nh = divide_out(P, cs.a1, cs.a2, pow2(16));

  ConnectionState out = cs;
  out.matrix.num = Nh;
  out.a1 = cs.a1 / q;
  out.a2 = cs.a2 / q;
  out.matrix.den = poly_from_roots({out.a2, cs.a4, cs.a6});
  out.w = Nh[0][0][0];
  out.step_index = cs.step_index + 1;
  refresh_vectors(out);
  return out;
}

ConnectionState modification_step_down(const ConnectionState& cs) {
  if (cs.coincident())
    throw NonGenericConnection("down-step requires distinct zero/pole");
  const Real& q = cs.q;
  const Vec2& w = cs.kernel_vec;
  const Vec2& wp = cs.residue_vec;
  Real ip = dot(w, wp);
  if (abs(ip) <= comparison_epsilon() * (abs(w[0]) + abs(w[1])) * (abs(wp[0]) + abs(wp[1])))
    throw NonGenericConnection("pairing <w, w'> vanishes");
  std::array<std::array<Real, 2>, 2> R0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      R0[i][j] = (cs.a2 - cs.a1) * w[static_cast<size_t>(i)] * wp[static_cast<size_t>(j)] / ip;

  PolyMat L, Rt;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      L[i][j] = i == j ? Poly{R0[i][j] - cs.a2, Real(1) / q} : Poly{R0[i][j]};
      Rt[i][j] = i == j ? Poly{-R0[i][j] - cs.a1, Real(1)} : Poly{-R0[i][j]};
    }
  PolyMat P = pm_mul(pm_mul(L, cs.matrix.num), Rt);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) P[i][j] = poly_scale(P[i][j], q);
  PolyMat Nh = divide_out(P, cs.a1, cs.a2, pow2(16));

  ConnectionState out = cs;
  out.matrix.num = Nh;
  out.a1 = q * cs.a1;
  out.a2 = q * cs.a2;
  out.matrix.den = poly_from_roots({out.a2, cs.a4, cs.a6});
  out.w = Nh[0][0][0];
  out.step_index = cs.step_index + 1;

  // canonical vector propagation
  auto Rmat = [&](const Real& z) {
    MatrixHP m = MatrixHP::identity(2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) += R0[i][j] / (z - cs.a2);
    return m;
  };
  auto Rinv = [&](const Real& z) {
    MatrixHP m = MatrixHP::identity(2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m(i, j) -= R0[i][j] / (z - cs.a1);
    return m;
  };
  Real za = q * cs.a1, zb = q * cs.a2;
  MatrixHP T1 = mul2(Rmat(za), inv2(cs.matrix.eval(za)));
  out.kernel_vec = {T1(0, 0) * w[0] + T1(0, 1) * w[1], T1(1, 0) * w[0] + T1(1, 1) * w[1]};
  MatrixHP T2 = mul2(cs.matrix.eval(zb), Rinv(zb));
  out.residue_vec = {wp[0] * T2(0, 0) + wp[1] * T2(1, 0), wp[0] * T2(0, 1) + wp[1] * T2(1, 1)};
  return out;
}

Real tau_closed_form(const Real& t, const Real& r, const Real& t_hat, const Real& r_hat,
                     const ConnectionState& cs) {
  (void)t;
  const Real Q = Real(1) / cs.q;
  Real num = (Q * r_hat * cs.w - cs.v * cs.a1 * cs.a2) * (Q * r * cs.w - cs.u * cs.a1 * cs.a2) *
             (Q * t_hat - cs.a1) * (Q * t_hat - cs.a2);
  Real den = cs.u * cs.v * (cs.a1 - Q * cs.a3) * (cs.a1 - Q * cs.a5) * (cs.a2 - Q * cs.a4) *
             (cs.a2 - Q * cs.a6) * cs.a1 * cs.a2;
  return num / den;
}

namespace {

Real delta_split_ratio(const ConnectionState& after) {
  auto [t, r] = extract_coordinates(after);
  const Real delta = pow2(-100);
  Real a1 = after.a1 * (Real(1) + delta);
  Real wsplit = after.w * sqrt(Real(1) + delta);
  ConnectionState rep = normal_form_from_coords(
      t, r, {a1, after.a2, after.a3, after.a4, after.a5, after.a6}, after.u, after.v, wsplit,
      after.q);
  ConnectionState stepped = modification_step_down(rep);
  Real g0 = dot(rep.kernel_vec, rep.residue_vec);
  Real g1 = dot(stepped.kernel_vec, stepped.residue_vec);
  if (g0.is_zero()) throw NonGenericConnection("split pairing vanished");
  return g1 / g0;
}

}  // namespace

Real tau_second_derivative(const ConnectionState& before, const ConnectionState& after) {
  if (after.step_index != before.step_index + 1)
    throw DomainError("tau_second_derivative: states not consecutive");
  if (before.coincident() || after.coincident()) return delta_split_ratio(after);
  Real g0 = dot(before.kernel_vec, before.residue_vec);
  Real g1 = dot(after.kernel_vec, after.residue_vec);
  Real scale0 = (abs(before.kernel_vec[0]) + abs(before.kernel_vec[1])) *
                (abs(before.residue_vec[0]) + abs(before.residue_vec[1]));
  if (abs(g0) <= comparison_epsilon() * scale0)
    throw NonGenericConnection("pairing <w, w'> numerically zero");
  return g1 / g0;
}

ConnectionState normal_form_from_coords(const Real& t, const Real& r,
                                        const std::array<Real, 6>& a, const Real& u,
                                        const Real& v, const Real& w, const Real& q) {
  const Real& a1 = a[0];
  const Real& a2 = a[1];
  const Real& a3 = a[2];
  const Real& a4 = a[3];
  const Real& a5 = a[4];
  const Real& a6 = a[5];
  Real prod_a = a1 * a2 * a3 * a4 * a5 * a6;
  if (abs(w * w - u * v * prod_a) > pow2(-PrecisionContext::bits() / 4) * abs(w * w))
    throw NonGenericConnection("w^2 != u v prod(a_i)");

  Poly Delta = poly_scale(poly_from_roots({a1, a2, a3, a4, a5, a6}), u * v);
  Real V = w * (t - a3) * (t - a4) * (t - a5) * (t - a6) / ((r * t + 1) * a3 * a4 * a5 * a6);
  if (V.is_zero()) throw NonGenericConnection("a11(t) forced to zero");
  Real U = poly_eval(Delta, t) / V;
  Real V1 = V - u * pow(t, 3) - w;
  Real U1 = U - v * pow(t, 3) - w;

  auto n11 = [&](const Real& g2) { return Poly{w, (V1 - g2 * t * t) / t, g2, u}; };
  auto n22 = [&](const Real& h2) { return Poly{w, (U1 - h2 * t * t) / t, h2, v}; };
  Poly n21{Real(0), -t, Real(1)};

  Poly base = poly_mul(n11(Real(0)), n22(Real(0)));
  Poly dg = poly_add(poly_mul(n11(Real(1)), n22(Real(0))), poly_scale(base, Real(-1)));
  Poly dh = poly_add(poly_mul(n11(Real(0)), n22(Real(1))), poly_scale(base, Real(-1)));
  Poly deta = poly_add(
      poly_add(poly_mul(n11(Real(1)), n22(Real(1))),
               poly_scale(poly_add(poly_mul(n11(Real(1)), n22(Real(0))),
                                   poly_mul(n11(Real(0)), n22(Real(1)))),
                          Real(-1))),
      base);
  Poly dk2 = poly_scale(poly_mul(Poly{Real(0), Real(0), Real(1)}, n21), Real(-1));
  Poly dk1 = poly_scale(poly_mul(Poly{Real(0), Real(1)}, n21), Real(-1));

  auto coef_at = [](const Poly& p, size_t d) { return d < p.size() ? p[d] : Real(0); };

  // 5 equations (z^1..z^5) in X = (g2, h2, k2, k1, eta), eta == g2 h2
  MatrixHP A(5, 5);
  std::vector<Real> rhs(5);
  for (size_t d = 1; d <= 5; ++d) {
    A(static_cast<long>(d - 1), 0) = coef_at(dg, d);
    A(static_cast<long>(d - 1), 1) = coef_at(dh, d);
    A(static_cast<long>(d - 1), 2) = coef_at(dk2, d);
    A(static_cast<long>(d - 1), 3) = coef_at(dk1, d);
    A(static_cast<long>(d - 1), 4) = coef_at(deta, d);
    rhs[d - 1] = coef_at(Delta, d) - coef_at(base, d);
  }

  // row-reduce with full pivoting on rows, tracking pivot columns
  long n = 5;
  std::vector<long> pivcols;
  long rank = 0;
  Real tol = comparison_epsilon() * (A.max_abs() + Real(1));
  for (long col = 0; col < n && rank < n; ++col) {
    long piv = -1;
    Real best(0);
    for (long rr = rank; rr < n; ++rr)
      if (abs(A(rr, col)) > best) { best = abs(A(rr, col)); piv = rr; }
    if (piv < 0 || best < tol) continue;
    for (long j = 0; j < n; ++j) std::swap(A(rank, j), A(piv, j));
    std::swap(rhs[static_cast<size_t>(rank)], rhs[static_cast<size_t>(piv)]);
    for (long rr = 0; rr < n; ++rr) {
      if (rr == rank) continue;
      Real f = A(rr, col) / A(rank, col);
      for (long j = 0; j < n; ++j) A(rr, j) -= f * A(rank, j);
      rhs[static_cast<size_t>(rr)] -= f * rhs[static_cast<size_t>(rank)];
    }
    pivcols.push_back(col);
    ++rank;
  }

  std::vector<Real> X0(5), nullv(5);
  std::vector<std::pair<Real, Real>> gh_candidates;  // (g2, h2) solutions
  if (rank == 5) {
    for (long i = 0; i < 5; ++i) X0[static_cast<size_t>(pivcols[static_cast<size_t>(i)])] =
        rhs[static_cast<size_t>(i)] / A(i, pivcols[static_cast<size_t>(i)]);
    gh_candidates.emplace_back(X0[0], X0[1]);
  } else {
    long freecol = -1;
    for (long c = 0; c < n; ++c) {
      bool ispiv = false;
      for (long pc : pivcols) ispiv = ispiv || (pc == c);
      if (!ispiv) { freecol = c; break; }
    }
    for (long i = 0; i < rank; ++i)
      X0[static_cast<size_t>(pivcols[static_cast<size_t>(i)])] =
          rhs[static_cast<size_t>(i)] / A(i, pivcols[static_cast<size_t>(i)]);
    nullv[static_cast<size_t>(freecol)] = Real(1);
    for (long i = 0; i < rank; ++i)
      nullv[static_cast<size_t>(pivcols[static_cast<size_t>(i)])] =
          -A(i, freecol) / A(i, pivcols[static_cast<size_t>(i)]);
    // eta(s) = g2(s) h2(s) along X0 + s nullv
    Real c2 = nullv[0] * nullv[1];
    Real c1 = X0[0] * nullv[1] + X0[1] * nullv[0] - nullv[4];
    Real c0 = X0[0] * X0[1] - X0[4];
    if (abs(c2) <= comparison_epsilon() * (abs(c1) + abs(c0) + Real(1))) {
      if (c1.is_zero()) throw NonGenericConnection("degenerate coefficient system");
      Real sroot = -c0 / c1;
      gh_candidates.emplace_back(X0[0] + sroot * nullv[0], X0[1] + sroot * nullv[1]);
    } else {
      Real disc = c1 * c1 - 4 * c2 * c0;
      if (disc.sign() < 0)
        throw NonGenericConnection("no real representative at these coordinates");
      Real sq = sqrt(disc);
      for (const Real& sroot : {(-c1 + sq) / (2 * c2), (-c1 - sq) / (2 * c2)}) {
        gh_candidates.emplace_back(X0[0] + sroot * nullv[0], X0[1] + sroot * nullv[1]);
        Real srep = sroot;
        std::vector<Real> X(5);
        for (int ii = 0; ii < 5; ++ii) X[static_cast<size_t>(ii)] = X0[static_cast<size_t>(ii)] + srep * nullv[static_cast<size_t>(ii)];
        gh_candidates.back() = {X[0], X[1]};
      }
    }
    // recover k2, k1 for each candidate below by re-solving linearly
  }

  for (auto& [g2, h2] : gh_candidates) {
    // with g2, h2 fixed, det matching at degrees 1..5 is linear in (k2, k1);
    // use two of the equations and verify the rest
    Poly n11p = n11(g2);
    Poly n22p = n22(h2);
    Poly diag = poly_mul(n11p, n22p);
    // det = diag - (k2 z^2 + k1 z) n21 = Delta
    Poly resid = poly_add(diag, poly_scale(Delta, Real(-1)));
    // solve k2 z^2 n21 + k1 z n21 = resid at two degrees
    Poly m2 = poly_mul(Poly{Real(0), Real(0), Real(1)}, n21);
    Poly m1 = poly_mul(Poly{Real(0), Real(1)}, n21);
    MatrixHP S(2, 2);
    std::vector<Real> b2(2);
    S(0, 0) = coef_at(m2, 3); S(0, 1) = coef_at(m1, 3); b2[0] = coef_at(resid, 3);
    S(1, 0) = coef_at(m2, 4); S(1, 1) = coef_at(m1, 4); b2[1] = coef_at(resid, 4);
    std::vector<Real> kk;
    try {
      kk = solve(S, b2);
    } catch (const NotSingular&) {
      continue;
    }
    ConnectionState cs;
    cs.q = q;
    cs.a1 = a1; cs.a2 = a2; cs.a3 = a3; cs.a4 = a4; cs.a5 = a5; cs.a6 = a6;
    cs.u = u; cs.v = v; cs.w = w;
    cs.matrix.den = poly_from_roots({a2, a4, a6});
    cs.matrix.num[0][0] = n11p;
    cs.matrix.num[0][1] = Poly{Real(0), kk[1], kk[0]};
    cs.matrix.num[1][0] = n21;
    cs.matrix.num[1][1] = n22p;
    Real zprobe = Real(std::string("-1.640625"));
    if (det_defect(cs, zprobe) > pow2(-PrecisionContext::bits() / 4)) continue;
    auto [t2, r2] = extract_coordinates(cs);
    if (abs(t2 - t) > pow2(-PrecisionContext::bits() / 4) * (abs(t) + Real(1))) continue;
    if (abs(r2 - r) > pow2(-PrecisionContext::bits() / 4) * (abs(r) + Real(1))) continue;
    try {
      refresh_vectors(cs);
    } catch (const Error&) {
      continue;
    }
    return cs;
  }
  throw NonGenericConnection("no valid representative found");
}

GapSequence reconstruct_gaps_tau(const EnsembleParams& p) {
  GapSequence seq;
  seq.provenance = GapProvenance::tau;
  std::vector<Real> D(static_cast<size_t>(p.N + 2));
  D[static_cast<size_t>(p.k)] = dkk(p);
  if (p.k + 1 <= p.N + 1) D[static_cast<size_t>(p.k + 1)] = dkk1(p);
  std::vector<ConnectionState> chain{build_Ak(p)};
  for (long s = p.k; s <= p.N; ++s) chain.push_back(modification_step(chain.back()));
  for (long s = p.k + 1; s <= p.N; ++s) {
    Real d2 = tau_second_derivative(chain[static_cast<size_t>(s - p.k)],
                                    chain[static_cast<size_t>(s + 1 - p.k)]);
    D[static_cast<size_t>(s + 1)] =
        d2 * D[static_cast<size_t>(s)] * D[static_cast<size_t>(s)] / D[static_cast<size_t>(s - 1)];
  }
  for (long s = p.k; s <= p.N + 1; ++s)
    seq.values.emplace_back(s, D[static_cast<size_t>(s)]);
  return seq;
}

ConnectionState gauge_transform(const ConnectionState& cs, const Real& c1, const Real& c2,
                                const Real& l0, const Real& l1) {
  if (c1.is_zero() || c2.is_zero()) throw DomainError("gauge diagonal must be nonzero");
  PolyMat Rq, adjR;
  Rq[0][0] = Poly{c1};
  Rq[0][1] = Poly{l0, l1 / cs.q};  // l(q^{-1} z)
  Rq[1][0] = Poly{Real(0)};
  Rq[1][1] = Poly{c2};
  adjR[0][0] = Poly{c2};
  adjR[0][1] = Poly{-l0, -l1};
  adjR[1][0] = Poly{Real(0)};
  adjR[1][1] = Poly{c1};
  PolyMat P = pm_mul(pm_mul(Rq, cs.matrix.num), adjR);
  ConnectionState out = cs;
  Real inv = Real(1) / (c1 * c2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.matrix.num[i][j] = poly_trim(poly_scale(P[i][j], inv), comparison_epsilon());
  out.w = out.matrix.num[0][0][0];
  refresh_vectors(out);
  return out;
}

}  // namespace qhahn
