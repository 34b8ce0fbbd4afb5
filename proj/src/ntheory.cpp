#include "qda/ntheory.hpp"

#include <algorithm>
#include <array>

#include "qda/errors.hpp"

namespace qda {

mpz_class isqrt(const mpz_class& n) {
  require(n >= 0, "isqrt of negative");
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_square(const mpz_class& n, mpz_class* root) {
  if (n < 0) return false;
  mpz_class r = isqrt(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

u64 isqrt_u64(u64 n) {
  u64 r = static_cast<u64>(__builtin_sqrtl(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

const std::vector<u64>& small_primes() {
  static const std::vector<u64> primes = [] {
    constexpr u64 limit = 1u << 16;
    std::vector<char> comp(limit, 0);
    std::vector<u64> out;
    for (u64 i = 2; i < limit; ++i) {
      if (comp[i]) continue;
      out.push_back(i);
      for (u64 j = i * i; j < limit; j += i) comp[j] = 1;
    }
    return out;
  }();
  return primes;
}

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<unsigned __int128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

namespace {

constexpr std::array<unsigned, 20> kWitnesses = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                                 31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

bool mr_round(const mpz_class& n, const mpz_class& nm1, const mpz_class& d, unsigned long s, unsigned w) {
  mpz_class x;
  mpz_class base = w;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == nm1) return true;
  for (unsigned long i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == nm1) return true;
    if (x == 1) return false;
  }
  return false;
}

bool mr_round_u64(u64 n, u64 d, int s, u64 w) {
  u64 x = powmod(w, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (unsigned p : kWitnesses) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  // first 12 primes are a deterministic witness set for 64-bit n
  for (int i = 0; i < 12; ++i)
    if (!mr_round_u64(n, d, s, kWitnesses[i])) return false;
  return true;
}

bool is_prime(const mpz_class& n) {
  if (n < 2) return false;
  if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime_u64(n.get_ui());
  for (u64 p : small_primes()) {
    if (p > 2000) break;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  mpz_class nm1 = n - 1;
  mpz_class d = nm1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  for (unsigned w : kWitnesses)
    if (!mr_round(n, nm1, d, s, w)) return false;
  return true;
}

namespace {

u64 gcd_u64(u64 a, u64 b) {
  while (b) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Brent's variant; deterministic increments c = 1, 2, ...
u64 pollard_brent(u64 n) {
  if (n % 2 == 0) return 2;
  for (u64 c = 1; c < 200; ++c) {
    auto f = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    u64 r = 1;
    const u64 m = 128;
    do {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      do {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = gcd_u64(q, n);
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1 && r < (u64{1} << 40));
    if (g == n) {
      do {
        ys = f(ys);
        g = gcd_u64(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
  }
  fail(ErrorKind::budget_exhausted, "factorization of " + std::to_string(n));
}

void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  u64 f = pollard_brent(n);
  factor_rec(f, out);
  factor_rec(n / f, out);
}

}  // namespace

Factorization factor_u64(u64 n) {
  require(n >= 1, "factor of zero");
  std::vector<u64> ps;
  for (u64 p : small_primes()) {
    if (p * p > n) break;
    while (n % p == 0) {
      ps.push_back(p);
      n /= p;
    }
  }
  factor_rec(n, ps);
  std::sort(ps.begin(), ps.end());
  Factorization out;
  for (u64 p : ps) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

int legendre(i64 a, u64 p) {
  i64 r = a % static_cast<i64>(p);
  if (r < 0) r += static_cast<i64>(p);
  if (r == 0) return 0;
  u64 e = powmod(static_cast<u64>(r), (p - 1) / 2, p);
  return e == 1 ? 1 : -1;
}

namespace {

u64 mod_of(i64 a, u64 m) {
  i64 r = a % static_cast<i64>(m);
  return static_cast<u64>(r < 0 ? r + static_cast<i64>(m) : r);
}

// Tonelli-Shanks, p odd prime, n a nonzero residue.
u64 tonelli(u64 n, u64 p) {
  u64 q = p - 1;
  int s = 0;
  while ((q & 1) == 0) q >>= 1, ++s;
  u64 z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  u64 m = static_cast<u64>(s), c = powmod(z, q, p), t = powmod(n, q, p), r = powmod(n, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) tt = mulmod(tt, tt, p), ++i;
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

std::vector<u64> roots_prime_power(i64 d, u64 p, int e) {
  u64 pk = p;
  std::vector<u64> roots;
  u64 dp = mod_of(d, p);
  if (p == 2 || dp == 0) {
    for (u64 x = 0; x < p; ++x)
      if (mulmod(x, x, p) == dp) roots.push_back(x);
  } else {
    if (legendre(static_cast<i64>(dp), p) != 1) return {};
    u64 r = tonelli(dp, p);
    roots = {std::min(r, p - r), std::max(r, p - r)};
  }
  bool generic = (p == 2 || dp == 0);
  for (int k = 1; k < e; ++k) {
    u64 next = pk * p;
    u64 dn = mod_of(d, next);
    std::vector<u64> lifted;
    for (u64 r : roots) {
      if (generic) {
        for (u64 t = 0; t < p; ++t) {
          u64 x = r + t * pk;
          if (mulmod(x, x, next) == dn) lifted.push_back(x);
        }
      } else {
        // x = r + t p^k with 2 r t = (d - r^2)/p^k mod p
        u64 r2 = mulmod(r, r, next);
        u64 diff = (dn + next - r2) % next;
        u64 c = (diff / pk) % p;
        u64 inv2r = powmod(mulmod(2, r, p), p - 2, p);
        u64 t = mulmod(c, inv2r, p);
        lifted.push_back(r + t * pk);
      }
    }
    roots = std::move(lifted);
    pk = next;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

}  // namespace

std::vector<u64> sqrt_mod(i64 d, u64 Q) {
  require(Q >= 1, "sqrt_mod modulus must be >= 1");
  std::vector<u64> acc = {0};
  u64 M = 1;
  for (auto [p, e] : factor_u64(Q)) {
    u64 pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    std::vector<u64> rs = roots_prime_power(d, p, e);
    if (rs.empty()) return {};
    // CRT: x = a mod M, x = r mod pe
    mpz_class inv, mm = M, pp = pe;
    mpz_invert(inv.get_mpz_t(), mm.get_mpz_t(), pp.get_mpz_t());
    std::vector<u64> next;
    u64 MP = M * pe;
    for (u64 a : acc)
      for (u64 r : rs) {
        u64 t = mulmod((r + pe - a % pe) % pe, inv.get_ui(), pe);
        next.push_back((a + mulmod(M, t, MP)) % MP);
      }
    acc = std::move(next);
    M = MP;
  }
  std::sort(acc.begin(), acc.end());
  return acc;
}

ExtGcd ext_gcd(const mpz_class& a, const mpz_class& b) {
  ExtGcd r;
  mpz_gcdext(r.g.get_mpz_t(), r.x.get_mpz_t(), r.y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

mpz_class fdiv(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

mpz_class cdiv(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

bool is_squarefree(u64 n) {
  for (auto [p, e] : factor_u64(n))
    if (e > 1) return false;
  return true;
}

}  // namespace qda
