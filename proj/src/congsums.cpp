#include "qda/congsums.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "qda/constants.hpp"
#include "qda/errors.hpp"

namespace qda {

namespace {

using i128 = __int128;

i64 floordiv(i64 a, i64 m) {
  i64 q = a / m;
  if ((a % m != 0) && ((a < 0) != (m < 0))) --q;
  return q;
}

i64 mod(i128 a, i64 m) {
  i128 r = a % m;
  if (r < 0) r += m;
  return static_cast<i64>(r);
}

// inverse of a mod m for gcd(a, m) = 1, m >= 1
i64 inv_mod(i64 a, i64 m) {
  if (m == 1) return 0;
  i64 r0 = m, r1 = mod(a, m), s0 = 0, s1 = 1;
  while (r1 != 0) {
    i64 q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
  }
  require(r0 == 1, "inverse does not exist");
  return mod(s0, m);
}

double log2max(i64 W) {
  double l = std::log(static_cast<double>(std::max<i64>(W, 2)));
  return l * l;
}

}  // namespace

i64 count_progression(i64 lo, i64 hi, i64 res, i64 m) {
  if (hi < lo) return 0;
  return floordiv(hi - res, m) - floordiv(lo - 1 - res, m);
}

i64 derive_z(i64 a, i64 b, i64 W) {
  require(W >= 1, "W must be >= 1");
  i64 g = std::gcd(a, b);
  if (g == 0) g = W;
  i64 Z = 1;
  for (auto [p, e] : factor_u64(static_cast<u64>(g))) {
    int eW = 0;
    for (i64 w = W; w % static_cast<i64>(p) == 0; w /= static_cast<i64>(p)) ++eW;
    for (int k = 0; k < std::min(e, eW / 2); ++k) Z *= static_cast<i64>(p);
  }
  return Z;
}

bool is_conformant(i64 a, i64 b, i64 W, long d) {
  require(W >= 1, "W must be >= 1");
  i128 v = static_cast<i128>(a) * a - static_cast<i128>(b) * b * d;
  return v % W == 0;
}

ThetaReduced reduce_query(const ThetaQuery& q, long d) {
  require(q.W >= 1, "W must be >= 1");
  ThetaReduced r{};
  r.Z = q.Z > 0 ? q.Z : derive_z(q.a, q.b, q.W);
  if (q.a % r.Z || q.b % r.Z || q.W % (r.Z * r.Z))
    fail(ErrorKind::non_conformant, "Z must divide a, b and Z^2 must divide W");
  r.ap = q.a / r.Z;
  r.bp = q.b / r.Z;
  r.Wp = q.W / (r.Z * r.Z);
  if (std::gcd(r.bp, r.Wp) == 1) {
    r.kind = ThetaCase::b_invertible;
    r.M = r.Wp;
    r.omega = mod(static_cast<i128>(r.ap) * inv_mod(r.bp, r.M), r.M);
  } else if (std::gcd(r.ap, r.Wp) == d) {
    r.kind = ThetaCase::a_divisible;
    r.M = r.Wp / d;
    r.omega = mod(static_cast<i128>(r.bp) * inv_mod(r.ap / d, r.M), r.M);
  } else {
    fail(ErrorKind::inverse_nonexistent, "neither gcd(b', W') = 1 nor gcd(a', W') = d");
  }
  return r;
}

ThetaQuery query_from_approximant(i64 u, i64 v, i64 f, i64 g, long d, i64 X) {
  require(f != 0 || g != 0, "denominator must be nonzero");
  // (u + v sqrt d)(f - g sqrt d)
  ThetaQuery q;
  q.X = X;
  q.a = u * f - v * g * d;
  q.b = v * f - u * g;
  q.W = std::llabs(f * f - g * g * d);
  q.Z = std::gcd(f, g);
  return q;
}

i64 theta_count_mod(i64 X, i64 a, i64 b, i64 M) {
  require(X >= 0 && M >= 1, "theta needs X >= 0 and M >= 1");
  if (X > kThetaBudget) fail(ErrorKind::budget_exhausted, "theta_count: X exceeds 10^6");
  // b B = c (mod M) is solvable iff g | c; then B runs over one class mod M/g
  i64 bm = mod(b, M);
  i64 g = std::gcd(bm, M);
  i64 m = M / g;
  i64 binv = inv_mod(bm / g, m);
  i64 total = 0;
  for (i64 A = -X; A <= X; ++A) {
    i64 c = mod(static_cast<i128>(a) * A, M);
    if (c % g) continue;
    i64 B0 = mod(static_cast<i128>(c / g) * binv, m);
    total += count_progression(-X, X, B0, m);
  }
  return total;
}

i64 theta_count(const ThetaQuery& q) { return theta_count_mod(q.X, q.a, q.b, q.W); }

ThetaBound theta_bound_check(const ThetaQuery& q, long d) {
  if (!is_conformant(q.a, q.b, q.W, d)) fail(ErrorKind::non_conformant, "a^2 - b^2 d is not divisible by W");
  ThetaBound tb;
  tb.reduced = reduce_query(q, d);
  tb.count = theta_count(q);
  double X = static_cast<double>(q.X), Z = static_cast<double>(tb.reduced.Z);
  tb.bound = kThetaC * (X * X * Z * Z / static_cast<double>(q.W) + 1) * log2max(q.W);
  tb.ratio = static_cast<double>(tb.count) / tb.bound;
  if (tb.reduced.M >= 2)
    tb.root = approx_root(mpz_class(static_cast<long>(tb.reduced.M)), mpz_class(static_cast<long>(tb.reduced.omega)), d);
  return tb;
}

Real kernel_sum(double H, double X, const Real& gamma) {
  require(H >= 0 && X >= 1, "kernel_sum needs H >= 0, X >= 1");
  require(H <= static_cast<double>(kKernelHMax), "kernel_sum: H exceeds 10^7");
  const Bits p = gamma.prec();
  const long hmax = static_cast<long>(std::floor(H));
  Real sum(X, p), Xr(X, p), t(p), one(1L, p);
  for (long h = 1; h <= hmax; ++h) {
    mpfr_mul_si(t.get(), gamma.get(), h, MPFR_RNDN);
    t = dist_to_int(t);
    // min(X, 1/t) with 1/0 = inf
    if (t.is_zero() || mpfr_cmp(one.get(), Real(t * Xr).get()) >= 0)
      sum += Xr;
    else
      sum += one / t;
  }
  return sum;
}

Real kernel_sum_rational(double H, double X, const mpz_class& num, const mpz_class& den, long prec) {
  require(H >= 0 && X >= 1, "kernel_sum needs H >= 0, X >= 1");
  require(den >= 1, "denominator must be positive");
  require(H <= static_cast<double>(kKernelHMax), "kernel_sum: H exceeds 10^7");
  const long hmax = static_cast<long>(std::floor(H));
  Real sum(X, prec), Xr(X, prec), t(prec);
  mpz_class k, nr = num % den;
  if (nr < 0) nr += den;
  // X as an exact rational for the min comparison
  mpq_class Xq(X);
  for (long h = 1; h <= hmax; ++h) {
    k = nr * h;
    mpz_mod(k.get_mpz_t(), k.get_mpz_t(), den.get_mpz_t());
    mpz_class dist = std::min(k, mpz_class(den - k));  // ||h gamma|| = dist/den
    if (dist == 0 || Xq * dist <= den) {
      sum += Xr;
    } else {
      mpfr_set_z(t.get(), den.get_mpz_t(), MPFR_RNDN);
      mpfr_div_z(t.get(), t.get(), dist.get_mpz_t(), MPFR_RNDN);
      sum += t;
    }
  }
  return sum;
}

namespace {

KernelBound kernel_bound_common(double H, double X, double sum, const mpq_class& err, const mpz_class& u,
                                const mpz_class& r) {
  if (r < 1 || gcd(u, r) != 1) fail(ErrorKind::certificate_invalid, "need r >= 1 and gcd(u, r) = 1");
  KernelBound kb;
  kb.cert = mpq_class(err * r * r).get_d();
  if (kb.cert > kKernelCertC) fail(ErrorKind::certificate_invalid, "|gamma - u/r| r^2 exceeds the certificate constant");
  double rd = r.get_d();
  kb.sum = sum;
  kb.bound = kKernelC * (1 + H / rd) * (X + rd) * std::log(2 * rd);
  kb.ratio = kb.sum / kb.bound;
  return kb;
}

}  // namespace

KernelBound kernel_bound_check(double H, double X, const Real& gamma, const mpz_class& u, const mpz_class& r) {
  Real s = kernel_sum(H, X, gamma);
  mpq_class err = abs(gamma.to_mpq() - mpq_class(u, r));
  return kernel_bound_common(H, X, s.to_double(), err, u, r);
}

KernelBound kernel_bound_check_rational(double H, double X, const mpq_class& gamma, const mpz_class& u,
                                        const mpz_class& r) {
  Real s = kernel_sum_rational(H, X, gamma.get_num(), gamma.get_den());
  mpq_class ur(u, r);
  ur.canonicalize();
  mpq_class err = abs(gamma - ur);
  return kernel_bound_common(H, X, s.to_double(), err, u, r);
}

i64 system_count(i64 U, i64 V, i64 a, i64 b, i64 W, long d) {
  require(U >= 0 && V >= 0 && W >= 1, "system_count needs U, V >= 0 and W >= 1");
  if (U > kSystemBudget || V > kSystemBudget) fail(ErrorKind::budget_exhausted, "system_count: U or V exceeds 10^3");
  i64 total = 0;
  for (i64 l = -U; l <= U; ++l)
    for (i64 m = -U; m <= U; ++m) {
      i64 r1 = mod(static_cast<i128>(a) * l + static_cast<i128>(b) * d * m, W);
      i64 r2 = mod(static_cast<i128>(b) * l + static_cast<i128>(a) * m, W);
      i64 n1 = count_progression(-V, V, r1, W);
      if (n1) total += n1 * count_progression(-V, V, r2, W);
    }
  return total;
}

double exclusion_constant(long d) {
  // beta u/r - m = alpha/W' - beta e with |e| <= c3/r^2: a nonzero left side
  // is >= 1/r, impossible once T (1 + c3/c1^2) c2 < 1; otherwise r | beta.
  RootConstants c = root_constants(d);
  return 0.99 * std::min(c.c1, 1 / (c.c2 * (1 + c.c3 / (c.c1 * c.c1))));
}

ExclusionReport small_k_exclusion_check(i64 Uq, i64 Vq, i64 a, i64 b, i64 W, long d) {
  require(Uq >= 0 && Vq >= 0 && W >= 1, "exclusion check needs Uq, Vq >= 0 and W >= 1");
  if (Uq > kSystemBudget || Vq > kSystemBudget) fail(ErrorKind::budget_exhausted, "exclusion check: range exceeds 10^3");
  if (!is_conformant(a, b, W, d)) fail(ErrorKind::non_conformant, "a^2 - b^2 d is not divisible by W");
  ThetaReduced red = reduce_query({0, a, b, W, 0}, d);
  ExclusionReport rep{};
  rep.threshold = exclusion_constant(d) * std::sqrt(static_cast<double>(red.Wp));
  if (red.kind == ThetaCase::b_invertible)
    rep.predicted = static_cast<double>(Uq) <= rep.threshold && static_cast<double>(Vq) <= rep.threshold;
  rep.only_trivial = true;
  for (i64 l = -Uq; l <= Uq && rep.only_trivial; ++l)
    for (i64 m = -Uq; m <= Uq; ++m) {
      if (l == 0 && m == 0) continue;
      i64 r1 = mod(static_cast<i128>(a) * l + static_cast<i128>(b) * d * m, W);
      i64 r2 = mod(static_cast<i128>(b) * l + static_cast<i128>(a) * m, W);
      if (count_progression(-Vq, Vq, r1, W) && count_progression(-Vq, Vq, r2, W)) {
        // smallest representatives in [-Vq, Vq]
        i64 al = r1 > W / 2 ? r1 - W : r1, be = r2 > W / 2 ? r2 - W : r2;
        if (std::llabs(al) > Vq) al = r1 - W * floordiv(r1 + Vq, W);
        if (std::llabs(be) > Vq) be = r2 - W * floordiv(r2 + Vq, W);
        rep.only_trivial = false;
        rep.witness = {l, m, al, be};
        break;
      }
    }
  return rep;
}

std::vector<ThetaQuery> conformant_corpus(long d, int n, i64 W_max, i64 X_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<i64> fd(1, 200), gd(0, 120), ud(-50, 50), zd(2, 5), pick(0, 3);
  std::uniform_int_distribution<i64> xd(0, X_max);
  std::vector<ThetaQuery> out;
  while (static_cast<int>(out.size()) < n) {
    i64 f = fd(rng), g = gd(rng), u = ud(rng), v = ud(rng), z = pick(rng) == 0 ? zd(rng) : 1, X = xd(rng);
    f *= z;
    g *= z;
    i64 W = std::llabs(f * f - g * g * d);
    if (W < 1 || W > W_max || (u == 0 && v == 0)) continue;
    ThetaQuery q = query_from_approximant(u, v, f, g, d, X);
    try {
      reduce_query(q, d);
    } catch (const Error&) {
      continue;
    }
    out.push_back(q);
  }
  return out;
}

std::vector<KernelInput> kernel_corpus(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<KernelInput> out;
  std::uniform_real_distribution<double> unit(0, 1);
  const long ds[] = {3, 7, 11};
  for (int i = 0; i < n; ++i) {
    KernelInput in;
    switch (i % 3) {
      case 0: {
        // random real in (0, 1) at 2^-64 resolution; certificate from a convergent
        mpz_class num = static_cast<unsigned long>(rng() | 1), den = 1;
        den <<= 64;
        in.gamma = mpq_class(num, den);
        in.gamma.canonicalize();
        std::vector<std::pair<mpz_class, mpz_class>> conv;
        mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0, x = num, y = den;
        while (y != 0) {
          mpz_class a = x / y, t = x - a * y;
          x = y;
          y = t;
          mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
          p0 = p1, q0 = q1, p1 = p2, q1 = q2;
          if (q1 > 1000000) break;
          conv.emplace_back(p1, q1);
        }
        auto [u, r] = conv[static_cast<std::size_t>(rng() % conv.size())];
        in.u = u;
        in.r = r;
        in.X = 1 + std::floor(unit(rng) * 1e4);
        in.H = std::floor(unit(rng) * 1e5);
        break;
      }
      case 1: {
        // the root pipeline: gamma = omega/Q with (u, r) from approx_root
        long d = ds[rng() % 3];
        u64 Q;
        std::vector<u64> roots;
        do {
          Q = 2 + rng() % 999999;
          roots = sqrt_mod(d, Q);
        } while (roots.empty());
        u64 w = roots[rng() % roots.size()];
        RootApprox ra = approx_root(mpz_class(static_cast<unsigned long>(Q)), mpz_class(static_cast<unsigned long>(w)), d);
        in.gamma = mpq_class(mpz_class(static_cast<unsigned long>(w)), mpz_class(static_cast<unsigned long>(Q)));
        in.gamma.canonicalize();
        in.u = ra.u;
        in.r = ra.r;
        double sq = std::sqrt(static_cast<double>(Q));
        in.X = 1 + std::floor(unit(rng) * 2 * sq);
        double lo = static_cast<double>(Q) / in.X, hi = static_cast<double>(Q);
        in.H = std::floor(lo + unit(rng) * (hi - lo));
        break;
      }
      default: {
        long r = 1 + static_cast<long>(rng() % 1000), u;
        do u = static_cast<long>(rng() % static_cast<u64>(r + 1)); while (std::gcd(u, r) != 1);
        in.gamma = mpq_class(u, r);
        in.gamma.canonicalize();
        in.u = u;
        in.r = r;
        in.X = 1 + std::floor(unit(rng) * 1e3);
        in.H = std::floor(unit(rng) * 1e4);
      }
    }
    out.push_back(std::move(in));
  }
  return out;
}

void write_theta_csv_header(std::ostream& os) { os << "X,a,b,W,Z,count,bound,ratio\n"; }

void write_theta_csv_row(std::ostream& os, const ThetaQuery& q, const ThetaBound& tb) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6f,%.6f", tb.bound, tb.ratio);
  os << q.X << ',' << q.a << ',' << q.b << ',' << q.W << ',' << tb.reduced.Z << ',' << tb.count << ',' << buf << '\n';
}

}  // namespace qda
