#include "qda/quadfield.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <tuple>

#include "qda/errors.hpp"
#include "qda/ntheory.hpp"

namespace qda {

std::string to_string(const QuadInt& x, long d) {
  std::string s = x.a.get_str();
  s += x.b < 0 ? "-" : "+";
  mpz_class ab = abs(x.b);
  s += ab.get_str() + "√" + std::to_string(d);
  return s;
}

mpz_class norm_signed(const QuadInt& x, long d) { return x.a * x.a - d * x.b * x.b; }
mpz_class norm(const QuadInt& x, long d) { return abs(norm_signed(x, d)); }

QuadInt mul(const QuadInt& x, const QuadInt& y, long d) {
  return {x.a * y.a + d * x.b * y.b, x.a * y.b + x.b * y.a};
}

bool exact_div(const QuadInt& x, const QuadInt& y, long d, QuadInt* quot) {
  require(!y.is_zero(), "division by zero");
  mpz_class n = norm_signed(y, d);
  QuadInt t = mul(x, y.conj(), d);
  if (!mpz_divisible_p(t.a.get_mpz_t(), n.get_mpz_t()) || !mpz_divisible_p(t.b.get_mpz_t(), n.get_mpz_t()))
    return false;
  if (quot) {
    mpz_divexact(quot->a.get_mpz_t(), t.a.get_mpz_t(), n.get_mpz_t());
    mpz_divexact(quot->b.get_mpz_t(), t.b.get_mpz_t(), n.get_mpz_t());
  }
  return true;
}

bool divides(const QuadInt& y, const QuadInt& x, long d) { return exact_div(x, y, d); }

bool associates(const QuadInt& x, const QuadInt& y, long d) {
  if (x.is_zero() || y.is_zero()) return x.is_zero() && y.is_zero();
  return divides(x, y, d) && divides(y, x, d);
}

namespace {

void check_d(long d) {
  if (d < 2) fail(ErrorKind::invalid_input, "d must be >= 2");
  mpz_class r;
  if (is_square(mpz_class(d), &r)) fail(ErrorKind::invalid_input, "d is a perfect square");
}

}  // namespace

QuadInt fundamental_unit(long d) {
  check_d(d);
  // continued fraction of sqrt(d): m, q, a with convergents h/k
  mpz_class a0 = isqrt(mpz_class(d));
  mpz_class m = 0, q = 1, a = a0;
  mpz_class h_prev = 1, h = a0, k_prev = 0, k = 1;
  for (;;) {
    mpz_class n = h * h - d * k * k;
    if (n == 1 || n == -1) return {h, k};
    m = a * q - m;
    q = (d - m * m) / q;
    a = (a0 + m) / q;
    mpz_class h_next = a * h + h_prev, k_next = a * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
}

QuadInt fundamental_unit_bruteforce(long d, long u_max) {
  check_d(d);
  for (long u = 1; u <= u_max; ++u) {
    mpz_class du2 = mpz_class(d) * u * u;
    mpz_class t;
    if (is_square(du2 - 1, &t) || is_square(du2 + 1, &t)) return {t, mpz_class(u)};
  }
  fail(ErrorKind::no_solution, "no unit with u <= " + std::to_string(u_max));
}

FieldCtx FieldCtx::make(long d, Bits precision_bits, double trunc_tol) {
  check_d(d);
  require(d % 4 == 3 && is_squarefree(static_cast<u64>(d)), "d must be square-free and 3 mod 4");
  require(precision_bits >= 64, "precision_bits must be >= 64");
  FieldCtx c;
  c.d = d;
  c.precision_bits = precision_bits;
  c.trunc_tol = trunc_tol;
  c.eps = fundamental_unit(d);
  c.eps_norm = sgn(norm_signed(c.eps, d));
  c.eps_inv = c.eps_norm > 0 ? c.eps.conj() : -c.eps.conj();
  if (c.eps.b <= 1000000) {
    // minimality oracle at desk scale
    QuadInt bf = fundamental_unit_bruteforce(d, c.eps.b.get_si());
    if (!(bf == c.eps)) fail(ErrorKind::invalid_input, "fundamental unit mismatch for d=" + std::to_string(d));
  }
  c.sqrt_d = sqrt_of(d, precision_bits);
  c.eps_real = Real(c.eps.a, precision_bits) + Real(c.eps.b, precision_bits) * c.sqrt_d;
  c.log_eps = log(c.eps_real);
  return c;
}

QuadInt FieldCtx::unit_pow(long k) const {
  QuadInt base = k >= 0 ? eps : eps_inv;
  unsigned long e = static_cast<unsigned long>(k >= 0 ? k : -k);
  QuadInt r(1, 0);
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

std::pair<Real, Real> FieldCtx::embed(const QuadInt& x) const {
  const Bits p = precision_bits;
  if (x.is_zero()) return {Real(p), Real(p)};
  Real n(norm_signed(x, d), p);
  if (sgn(x.a) * sgn(x.b) >= 0) {
    Real s1 = Real(x.a, p) + Real(x.b, p) * sqrt_d;
    Real s2 = n / s1;
    return {std::move(s1), std::move(s2)};
  }
  Real s2 = Real(x.a, p) - Real(x.b, p) * sqrt_d;
  Real s1 = n / s2;
  return {std::move(s1), std::move(s2)};
}

Real FieldCtx::sigma1(const QuadInt& x) const { return embed(x).first; }
Real FieldCtx::sigma2(const QuadInt& x) const { return embed(x).second; }

namespace {

// |sigma_2(y)| >= |sigma_1(y)|  <=>  a b <= 0
bool ratio_at_least_one(const QuadInt& y) { return sgn(y.a) * sgn(y.b) <= 0; }

// ratio r = |sigma_2/sigma_1|; r >= 1/eps and r < eps, tested on m^2 eps^-+1
bool ratio_low_ok(const QuadInt& m, const FieldCtx& ctx) {
  return ratio_at_least_one(ctx.mul(ctx.mul(m, m), ctx.eps_inv));
}
bool ratio_high_ok(const QuadInt& m, const FieldCtx& ctx) {
  return !ratio_at_least_one(ctx.mul(ctx.mul(m, m), ctx.eps));
}

int sign_sigma1(const QuadInt& x, long d) {
  int sa = sgn(x.a), sb = sgn(x.b);
  if (sa * sb >= 0) return sa != 0 ? sa : sb;
  return x.a * x.a > d * x.b * x.b ? sa : sb;
}

}  // namespace

bool in_fundamental_domain(const QuadInt& m, const FieldCtx& ctx) {
  return !m.is_zero() && ratio_low_ok(m, ctx) && ratio_high_ok(m, ctx);
}

Balanced balance_unit(const QuadInt& m, const FieldCtx& ctx) {
  if (m.is_zero()) fail(ErrorKind::invalid_input, "balance_unit of zero");
  auto [s1, s2] = ctx.embed(m);
  Real rho = (log(abs(s2)) - log(abs(s1))) / (ctx.log_eps * 2L);
  Real half(0.5, ctx.precision_bits);
  long k = floor(rho + half).floor_z().get_si();
  QuadInt y = ctx.mul(m, ctx.unit_pow(k));
  // numerical k is off by at most one; settle it exactly
  for (int guard = 0; guard < 64; ++guard) {
    if (!ratio_low_ok(y, ctx)) {
      y = ctx.mul(y, ctx.eps_inv);
      --k;
    } else if (!ratio_high_ok(y, ctx)) {
      y = ctx.mul(y, ctx.eps);
      ++k;
    } else {
      return {k, y};
    }
  }
  fail(ErrorKind::precision_exhausted, "balance_unit did not settle");
}

QuadInt canonical(const QuadInt& m, const FieldCtx& ctx) {
  QuadInt y = balance_unit(m, ctx).m_bal;
  return sign_sigma1(y, ctx.d) < 0 ? -y : y;
}

namespace {

void require_euclidean(long d) {
  if (d != 3 && d != 7 && d != 11) fail(ErrorKind::unsupported_d, "gcd needs d in {3, 7, 11}, got " + std::to_string(d));
}

// x = y*quot + r with |N(r)| < |N(y)|
QuadInt euclid_rem(const QuadInt& x, const QuadInt& y, long d) {
  mpz_class n = norm_signed(y, d);
  QuadInt t = mul(x, y.conj(), d);
  mpq_class s(t.a, n), u(t.b, n);
  s.canonicalize();
  u.canonicalize();
  // Plain coordinate rounding is not enough for d = 7, 11; search a window
  // of quotients and keep the one with the smallest norm.
  mpz_class s0 = fdiv(s.get_num(), s.get_den()), u0 = fdiv(u.get_num(), u.get_den());
  const long span = static_cast<long>(std::ceil(3 * std::sqrt(static_cast<double>(d)))) + 2;
  mpq_class best = -1;
  QuadInt best_q;
  for (long j = -2; j <= 3; ++j) {
    mpz_class qb = u0 + j;
    mpq_class db = u - qb;
    for (long i = -span; i <= span; ++i) {
      mpz_class qa = s0 + i;
      mpq_class da = s - qa;
      mpq_class nn = abs(da * da - d * db * db);
      if (best < 0 || nn < best) {
        best = nn;
        best_q = {qa, qb};
      }
    }
  }
  if (best >= 1) fail(ErrorKind::unsupported_d, "no Euclidean quotient found");
  return x - mul(y, best_q, d);
}

}  // namespace

QuadInt euclid_gcd(const QuadInt& p, const QuadInt& q, const FieldCtx& ctx) {
  require_euclidean(ctx.d);
  if (p.is_zero() && q.is_zero()) fail(ErrorKind::invalid_input, "gcd(0, 0)");
  QuadInt x = p, y = q;
  while (!y.is_zero()) {
    QuadInt r = euclid_rem(x, y, ctx.d);
    x = std::move(y);
    y = std::move(r);
  }
  return canonical(x, ctx);
}

const char* to_string(PrimeKind k) {
  switch (k) {
    case PrimeKind::split: return "split";
    case PrimeKind::inert: return "inert";
    case PrimeKind::ramified: return "ramified";
  }
  return "?";
}

QuadInt prime_generator(long p, const FieldCtx& ctx) {
  const long d = ctx.d;
  const double e = ctx.eps_real.to_double();
  auto bound = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(p) / static_cast<double>(d - 1)) * (1 + e)));
  long lo = 0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    for (long b = lo; b <= bound; ++b) {
      __int128 db2 = static_cast<__int128>(d) * b * b;
      for (int s : {1, -1}) {
        __int128 t = db2 + static_cast<__int128>(s) * p;
        if (t < 0) continue;
        u64 r = isqrt_u64(static_cast<u64>(t));
        if (static_cast<__int128>(r) * r == t) return canonical(QuadInt(mpz_class(static_cast<long>(r)), mpz_class(b)), ctx);
      }
    }
    lo = bound + 1;
    bound *= 4;
  }
  fail(ErrorKind::generator_not_found, "no element of norm " + std::to_string(p));
}

std::vector<PrimeElem> enumerate_prime_elements(const FieldCtx& ctx, long norm_max) {
  require(norm_max >= 2, "norm_max must be >= 2");
  const long d = ctx.d;
  std::vector<char> comp(static_cast<std::size_t>(norm_max) + 1, 0);
  std::vector<PrimeElem> out;
  for (long p = 2; p <= norm_max; ++p) {
    if (comp[p]) continue;
    for (long j = p * p; j <= norm_max && p <= norm_max / p; j += p) comp[j] = 1;
    if (p == 2 || d % p == 0) {
      out.push_back({prime_generator(p, ctx), p, PrimeKind::ramified, p});
    } else if (legendre(d, static_cast<u64>(p)) == 1) {
      QuadInt g = prime_generator(p, ctx);
      out.push_back({g, p, PrimeKind::split, p});
      out.push_back({canonical(g.conj(), ctx), p, PrimeKind::split, p});
    } else if (p <= norm_max / p) {
      out.push_back({canonical(QuadInt(p, 0), ctx), mpz_class(p) * p, PrimeKind::inert, p});
    }
  }
  std::sort(out.begin(), out.end(), [](const PrimeElem& x, const PrimeElem& y) {
    auto key = [](const PrimeElem& e) { return std::make_tuple(e.norm, abs(e.gen.a), e.gen.a, e.gen.b); };
    return key(x) < key(y);
  });
  return out;
}

void write_prime_csv(std::ostream& os, const std::vector<PrimeElem>& ps) {
  os << "norm,kind,rational_prime,gen_a,gen_b\n";
  for (const auto& e : ps)
    os << e.norm << ',' << to_string(e.kind) << ',' << e.rational_prime << ',' << e.gen.a << ',' << e.gen.b << '\n';
}

Real unit_orbit_inv_norm_sum(const QuadInt& a, const FieldCtx& ctx) {
  if (a.is_zero()) fail(ErrorKind::invalid_input, "unit_orbit_inv_norm_sum of zero");
  auto [s1, s2] = ctx.embed(balance_unit(a, ctx).m_bal);
  const Bits p = ctx.precision_bits;
  Real x1 = sqr(s1), x2 = sqr(s2);
  Real e2 = sqr(ctx.eps_real);
  Real one(1L, p), tol(ctx.trunc_tol, p);
  Real total = one / (x1 + x2);
  // n > 0 and n < 0 sides; terms decay like eps^(-2|n|)
  for (int side : {1, -1}) {
    Real y1 = x1, y2 = x2;
    for (int n = 1; n < 100000; ++n) {
      if (side > 0) {
        y1 *= e2;
        y2 /= e2;
      } else {
        y1 /= e2;
        y2 *= e2;
      }
      Real t = one / (y1 + y2);
      total += t;
      if (t < tol * total) break;
    }
  }
  return total * 2L;  // +-q
}

}  // namespace qda
