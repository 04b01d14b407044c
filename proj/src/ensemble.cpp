#include "qhahn/ensemble.hpp"

#include <cmath>

#include "qhahn/errors.hpp"

namespace qhahn {

Real qpochhammer(const Real& y, const Real& q, long n) {
  if (n < 0) throw DomainError("qpochhammer: negative length");
  Real r(1), f(1);
  for (long j = 0; j < n; ++j) {
    r *= (Real(1) - y * f);
    f *= q;
  }
  return r;
}

Real weight(long x, const EnsembleParams& p) {
  const Real qmN = pow(p.q, -p.N);
  Real num = qpochhammer(p.alpha * p.q, p.q, x) * qpochhammer(qmN, p.q, x);
  Real den = qpochhammer(p.q, p.q, x) * qpochhammer(qmN / p.beta, p.q, x);
  return pow(p.alpha * p.beta * p.q, -x) * num / den;
}

void validate(const EnsembleParams& p) {
  if (!(p.q > Real(0) && p.q < Real(1)))
    throw InadmissibleParams("q must lie in (0,1)");
  if (p.k < 1 || p.k > p.N)
    throw InadmissibleParams("need 1 <= k <= N");
  const Real qi = Real(1) / p.q;
  const Real qmN = pow(p.q, -p.N);
  bool low = p.alpha > Real(0) && p.alpha < qi && p.beta > Real(0) && p.beta < qi;
  bool high = p.alpha > qmN && p.beta > qmN;
  if (!low && !high)
    throw InadmissibleParams("(alpha, beta) outside both admissible ranges");
  for (long x = 0; x <= p.N; ++x)
    if (!(weight(x, p) > Real(0)))
      throw InadmissibleParams("weight non-positive at x=" + std::to_string(x));
}

Lattice build_lattice(const EnsembleParams& p) {
  Lattice lat;
  lat.points.reserve(static_cast<size_t>(p.N) + 1);
  lat.weights.reserve(static_cast<size_t>(p.N) + 1);
  for (long i = 0; i <= p.N; ++i) {
    lat.points.push_back(pow(p.q, -i));
    lat.weights.push_back(weight(i, p));
  }
  return lat;
}

Real OrthoBasis::eval(long j, const Real& z) const {
  const Poly& c = newton[static_cast<size_t>(j)];
  Real r(0);
  for (size_t m = c.size(); m-- > 0;) {
    r = r * (z - nodes[m]) + c[m];
  }
  return r;
}

OrthoBasis build_basis(const EnsembleParams& p, long support, long degree) {
  if (support <= degree)
    throw DegenerateSupport("support must exceed requested degree");
  if (support > p.N + 1)
    throw DegenerateSupport("support exceeds lattice size");
  Lattice lat = build_lattice(p);

  OrthoBasis b;
  b.support_size = support;
  b.degree = degree;
  b.nodes.assign(lat.points.begin(), lat.points.begin() + support);
  const std::vector<Real>& w = lat.weights;

  auto inner = [&](const std::vector<Real>& f, const std::vector<Real>& g) {
    Real s(0);
    for (long x = 0; x < support; ++x)
      s += f[static_cast<size_t>(x)] * g[static_cast<size_t>(x)] * w[static_cast<size_t>(x)];
    return s;
  };

  b.values.push_back(std::vector<Real>(static_cast<size_t>(support), Real(1)));
  b.newton.push_back(Poly{Real(1)});
  b.monic.push_back(Poly{Real(1)});
  b.norms.push_back(inner(b.values[0], b.values[0]));

  // Stieltjes: P_{j+1} = (y - alpha_j) P_j - beta_j P_{j-1}
  for (long j = 0; j < degree; ++j) {
    std::vector<Real> yPj(static_cast<size_t>(support));
    for (long x = 0; x < support; ++x)
      yPj[static_cast<size_t>(x)] = b.nodes[static_cast<size_t>(x)] * b.values.back()[static_cast<size_t>(x)];
    Real alpha_j = inner(yPj, b.values.back()) / b.norms.back();
    Real beta_j = j > 0 ? b.norms[static_cast<size_t>(j)] / b.norms[static_cast<size_t>(j - 1)] : Real(0);

    std::vector<Real> vals(static_cast<size_t>(support));
    for (long x = 0; x < support; ++x) {
      Real v = (b.nodes[static_cast<size_t>(x)] - alpha_j) * b.values.back()[static_cast<size_t>(x)];
      if (j > 0) v -= beta_j * b.values[static_cast<size_t>(j - 1)][static_cast<size_t>(x)];
      vals[static_cast<size_t>(x)] = v;
    }

    // Newton update: y * B_m = B_{m+1} + n_m B_m  (B_m the Newton basis)
    const Poly& cj = b.newton.back();
    Poly nc(cj.size() + 1);
    for (size_t m = 0; m < cj.size(); ++m) {
      nc[m + 1] += cj[m];
      nc[m] += cj[m] * (b.nodes[m] - alpha_j);
    }
    if (j > 0) {
      const Poly& cm = b.newton[static_cast<size_t>(j - 1)];
      for (size_t m = 0; m < cm.size(); ++m) nc[m] -= beta_j * cm[m];
    }
    b.newton.push_back(std::move(nc));

    Poly mono(b.monic.back().size() + 1);
    for (size_t m = 0; m < b.monic.back().size(); ++m) {
      mono[m + 1] += b.monic.back()[m];
      mono[m] -= alpha_j * b.monic.back()[m];
    }
    if (j > 0)
      for (size_t m = 0; m < b.monic[static_cast<size_t>(j - 1)].size(); ++m)
        mono[m] -= beta_j * b.monic[static_cast<size_t>(j - 1)][m];
    b.monic.push_back(std::move(mono));

    Real h = inner(vals, vals);
    if (!(h > Real(0)))
      throw DegenerateSupport("norm collapsed during Stieltjes recurrence");
    b.values.push_back(std::move(vals));
    b.norms.push_back(std::move(h));
  }
  return b;
}

Real normalizer_Z(const EnsembleParams& p, const OrthoBasis& basis) {
  if (basis.support_size != p.N + 1)
    throw DegenerateSupport("normalizer_Z needs the full-support basis");
  Real z(1);
  for (long i = 0; i < p.k; ++i) z *= basis.norms[static_cast<size_t>(i)];
  return z;
}

Real kernel_entry(const EnsembleParams& p, const Lattice& lat, const OrthoBasis& basis,
                  long i, long j) {
  const long k = p.k;
  const Real& hk1 = basis.norms[static_cast<size_t>(k - 1)];
  auto u = [&](long x) { return basis.values[static_cast<size_t>(k)][static_cast<size_t>(x)]; };
  auto v = [&](long x) { return basis.values[static_cast<size_t>(k - 1)][static_cast<size_t>(x)] / hk1; };
  if (i != j) {
    Real num = u(i) * v(j) - v(i) * u(j);
    return sqrt(lat.weights[static_cast<size_t>(i)]) * sqrt(lat.weights[static_cast<size_t>(j)]) * num /
           (lat.points[static_cast<size_t>(i)] - lat.points[static_cast<size_t>(j)]);
  }
  Poly du = poly_derivative(basis.monic[static_cast<size_t>(k)]);
  Poly dv = poly_derivative(basis.monic[static_cast<size_t>(k - 1)]);
  const Real& y = lat.points[static_cast<size_t>(i)];
  Real val = poly_eval(du, y) * v(i) - u(i) * poly_eval(dv, y) / hk1;
  return lat.weights[static_cast<size_t>(i)] * val;
}

MatrixHP kernel_matrix(const EnsembleParams& p, const Lattice& lat, const OrthoBasis& basis,
                       long section_start) {
  long n = p.N + 1 - section_start;
  MatrixHP K(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j)
      K(i, j) = kernel_entry(p, lat, basis, section_start + i, section_start + j);
  return K;
}

Real gap_direct(const EnsembleParams& p, long s) {
  validate(p);
  if (s >= p.N + 1) return Real(1);
  if (s < p.k) return Real(0);
  Lattice lat = build_lattice(p);
  OrthoBasis basis = build_basis(p, p.N + 1, p.k);
  MatrixHP K = kernel_matrix(p, lat, basis, s);
  MatrixHP M = MatrixHP::identity(K.rows);
  for (long i = 0; i < K.rows; ++i)
    for (long j = 0; j < K.cols; ++j) M(i, j) -= K(i, j);
  return det(M);
}

namespace {

double log_binomial(long n, long k) {
  double r = 0;
  for (long i = 0; i < k; ++i) r += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
  return r;
}

// Sum of prod_{i<j} (y_i - y_j)^2 prod omega over k-subsets of {0..upto-1}.
Real subset_sum(const Lattice& lat, long upto, long k) {
  std::vector<long> idx(static_cast<size_t>(k));
  for (long i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
  Real total(0);
  while (true) {
    Real term(1);
    for (long a = 0; a < k; ++a) {
      for (long b = a + 1; b < k; ++b) {
        Real d = lat.points[static_cast<size_t>(idx[static_cast<size_t>(a)])] -
                 lat.points[static_cast<size_t>(idx[static_cast<size_t>(b)])];
        term *= d * d;
      }
      term *= lat.weights[static_cast<size_t>(idx[static_cast<size_t>(a)])];
    }
    total += term;
    long pos = k - 1;
    while (pos >= 0 && idx[static_cast<size_t>(pos)] == upto - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<size_t>(pos)];
    for (long i = pos + 1; i < k; ++i) idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
  }
  return total;
}

}  // namespace

Real gap_bruteforce(const EnsembleParams& p, long s) {
  validate(p);
  if (log_binomial(p.N + 1, p.k) > std::log(1e6))
    throw TooLarge("C(N+1,k) exceeds the enumeration guard");
  if (s >= p.N + 1) return Real(1);
  if (s < p.k) return Real(0);
  Lattice lat = build_lattice(p);
  return subset_sum(lat, s, p.k) / subset_sum(lat, p.N + 1, p.k);
}

long suggested_bits(const EnsembleParams& p) {
  double lq = -std::log2(p.q.to_double());
  long need = static_cast<long>(4.0 * static_cast<double>(p.N) * lq) + 64;
  return std::max(256L, need);
}

}  // namespace qhahn
