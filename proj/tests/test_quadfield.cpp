#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "qda/errors.hpp"
#include "qda/ntheory.hpp"
#include "qda/quadfield.hpp"

using namespace qda;

namespace {

// Independent Pell scan in machine integers.
std::pair<long, long> pell_scan(long d) {
  for (long u = 1; u < 1000000; ++u) {
    for (long s : {-1L, 1L}) {
      long t2 = d * u * u + s;
      long t = std::lround(std::sqrt(static_cast<double>(t2)));
      for (long c = t - 1; c <= t + 1; ++c)
        if (c > 0 && c * c == t2) return {c, u};
    }
  }
  return {0, 0};
}

// Legendre-symbol driven count of prime ideals of norm <= X.
long prime_ideal_count(long d, long X) {
  std::vector<char> comp(X + 1, 0);
  long count = 0;
  for (long p = 2; p <= X; ++p) {
    if (comp[p]) continue;
    for (long j = 2 * p; j <= X; j += p) comp[j] = 1;
    if (p == 2 || d % p == 0) {
      count += 1;
      continue;
    }
    long r = 1, base = ((d % p) + p) % p, e = (p - 1) / 2;
    while (e) {
      if (e & 1) r = r * base % p;
      base = base * base % p;
      e >>= 1;
    }
    if (r == 1)
      count += 2;
    else if (p * p <= X)
      count += 1;
  }
  return count;
}

// All elements of norm exactly n up to units, one balanced representative each.
std::vector<QuadInt> elements_of_norm(long n, const FieldCtx& ctx) {
  std::vector<QuadInt> out;
  double e = ctx.eps_real.to_double();
  long amax = static_cast<long>(std::sqrt(e * n)) + 2;
  long bmax = static_cast<long>(std::sqrt(e * n / ctx.d)) + 2;
  for (long a = -amax; a <= amax; ++a)
    for (long b = -bmax; b <= bmax; ++b) {
      QuadInt x(a, b);
      if (norm(x, ctx.d) != n) continue;
      bool seen = false;
      for (const auto& y : out)
        if (associates(x, y, ctx.d)) seen = true;
      if (!seen) out.push_back(x);
    }
  return out;
}

QuadInt gcd_oracle(const QuadInt& p, const QuadInt& q, const FieldCtx& ctx) {
  long np = norm(p, ctx.d).get_si(), nq = norm(q, ctx.d).get_si();
  long g = std::gcd(np, nq);
  QuadInt best(1, 0);
  long best_norm = 1;
  for (long n = 1; n <= g; ++n) {
    if (g % n) continue;
    for (const auto& c : elements_of_norm(n, ctx))
      if (divides(c, p, ctx.d) && divides(c, q, ctx.d) && n > best_norm) {
        best = c;
        best_norm = n;
      }
  }
  return best;
}

}  // namespace

TEST_CASE("fundamental units match the Pell scan") {
  for (long d : {3L, 7L, 11L, 19L, 23L, 31L}) {
    auto [t, u] = pell_scan(d);
    QuadInt e = fundamental_unit(d);
    CHECK(e.a == t);
    CHECK(e.b == u);
  }
  CHECK(fundamental_unit(3) == QuadInt(2, 1));
  CHECK(fundamental_unit(7) == QuadInt(8, 3));
  CHECK(fundamental_unit(11) == QuadInt(10, 3));
  CHECK_THROWS_AS(fundamental_unit(9), Error);
  CHECK_THROWS_AS(fundamental_unit(1), Error);
}

TEST_CASE("norm is multiplicative and conjugation is an involution") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> coord(-100000, 100000);
  for (long d : {3L, 7L, 11L}) {
    for (int i = 0; i < 1000; ++i) {
      QuadInt x(coord(rng), coord(rng)), y(coord(rng), coord(rng));
      CHECK(norm(mul(x, y, d), d) == norm(x, d) * norm(y, d));
      CHECK(x.conj().conj() == x);
    }
  }
}

TEST_CASE("balance_unit examples") {
  auto ctx = FieldCtx::make(3);
  auto b1 = balance_unit(QuadInt(1, 0), ctx);
  CHECK(b1.k == 0);
  CHECK(b1.m_bal == QuadInt(1, 0));

  auto b10 = balance_unit(ctx.unit_pow(10), ctx);
  CHECK(b10.k == -10);
  CHECK(b10.m_bal == QuadInt(1, 0));
  CHECK(balance_unit(ctx.unit_pow(-7), ctx).k == 7);

  QuadInt m(5, 3);
  auto b = balance_unit(m, ctx);
  CHECK(b.m_bal == mul(m, ctx.unit_pow(b.k), 3));
  auto [s1, s2] = ctx.embed(b.m_bal);
  Real r2 = sqrt_of(2, 192);
  CHECK(abs(s1) >= r2 / ctx.eps_real);
  CHECK(abs(s1) <= r2 * ctx.eps_real);
  CHECK(abs(s2) >= r2 / ctx.eps_real);
  CHECK(abs(s2) <= r2 * ctx.eps_real);
  CHECK_THROWS_AS(balance_unit(QuadInt(0, 0), ctx), Error);
}

TEST_CASE("balance_unit two-sided bound on random inputs") {
  std::mt19937_64 rng(12);
  for (long d : {3L, 7L, 11L}) {
    auto ctx = FieldCtx::make(d);
    long lim = static_cast<long>(std::sqrt(1e8 / (2.0 * d)));
    std::uniform_int_distribution<long> coord(-lim, lim);
    std::uniform_int_distribution<long> kdist(-20, 20);
    int checked = 0;
    while (checked < 1000) {
      QuadInt m(coord(rng), coord(rng));
      if (m.is_zero() || norm(m, d) > 100000000) continue;
      QuadInt w = mul(m, ctx.unit_pow(kdist(rng)), d);
      auto b = balance_unit(w, ctx);
      CHECK(associates(b.m_bal, m, d));
      Real rn = sqrt_of(norm(m, d), 256);
      auto [s1, s2] = ctx.embed(b.m_bal);
      CHECK(abs(s1) >= rn / ctx.eps_real);
      CHECK(abs(s1) <= rn * ctx.eps_real);
      CHECK(abs(s2) >= rn / ctx.eps_real);
      CHECK(abs(s2) <= rn * ctx.eps_real);
      ++checked;
    }
  }
}

TEST_CASE("canonical generator is unique per ideal") {
  auto ctx = FieldCtx::make(7);
  QuadInt m(3, 1);
  QuadInt c = canonical(m, ctx);
  for (long k = -5; k <= 5; ++k) {
    CHECK(canonical(mul(m, ctx.unit_pow(k), 7), ctx) == c);
    CHECK(canonical(-mul(m, ctx.unit_pow(k), 7), ctx) == c);
  }
  CHECK(ctx.sigma1(c).sign() > 0);
}

TEST_CASE("euclid_gcd examples") {
  auto ctx = FieldCtx::make(3);
  QuadInt q(4, 1);
  CHECK(associates(euclid_gcd(q, QuadInt(0, 0), ctx), q, 3));
  CHECK(associates(euclid_gcd(QuadInt(1, 1), QuadInt(2, 0), ctx), QuadInt(1, 1), 3));
  CHECK(associates(euclid_gcd(QuadInt(4, 1), QuadInt(5, 0), ctx), QuadInt(1, 0), 3));
  CHECK_THROWS_AS(euclid_gcd(QuadInt(1, 0), QuadInt(2, 0), FieldCtx::make(19)), Error);
}

TEST_CASE("euclid_gcd agrees with the divisor-intersection oracle") {
  for (long d : {3L, 7L, 11L}) {
    auto ctx = FieldCtx::make(d);
    std::vector<QuadInt> pool;
    for (long a = -15; a <= 15; ++a)
      for (long b = -5; b <= 5; ++b) {
        QuadInt x(a, b);
        if (!x.is_zero() && norm(x, d) <= 200) pool.push_back(x);
      }
    std::mt19937_64 rng(13 + d);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 150; ++i) {
      const QuadInt& p = pool[pick(rng)];
      const QuadInt& q = pool[pick(rng)];
      QuadInt g = euclid_gcd(p, q, ctx);
      CHECK(associates(g, gcd_oracle(p, q, ctx), d));
      CHECK(in_fundamental_domain(g, ctx));
    }
  }
}

TEST_CASE("prime element examples") {
  auto ctx = FieldCtx::make(3);
  auto small = enumerate_prime_elements(ctx, 3);
  REQUIRE(small.size() == 2);
  CHECK(small[0].gen == QuadInt(1, 1));
  CHECK(small[0].norm == 2);
  CHECK(small[0].kind == PrimeKind::ramified);
  CHECK(small[1].gen == QuadInt(0, 1));
  CHECK(small[1].kind == PrimeKind::ramified);

  auto ps = enumerate_prime_elements(ctx, 30);
  bool found13 = false, found25 = false;
  for (const auto& e : ps) {
    if (e.norm == 13 && e.gen == QuadInt(4, 1)) found13 = (e.kind == PrimeKind::split);
    if (e.norm == 25) found25 = (e.gen == QuadInt(5, 0) && e.kind == PrimeKind::inert);
  }
  CHECK(found13);
  CHECK(found25);
}

TEST_CASE("prime ideal count matches the Legendre oracle") {
  for (long d : {3L, 7L, 11L}) {
    auto ctx = FieldCtx::make(d);
    for (long X : {2L, 50L, 1000L, 100000L}) {
      auto ps = enumerate_prime_elements(ctx, X);
      CHECK(static_cast<long>(ps.size()) == prime_ideal_count(d, X));
    }
    auto ps = enumerate_prime_elements(ctx, 20000);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      CHECK(norm(ps[i].gen, d) == ps[i].norm);
      CHECK(in_fundamental_domain(ps[i].gen, ctx));
      if (i + 1 < ps.size() && ps[i + 1].norm == ps[i].norm) CHECK(!associates(ps[i].gen, ps[i + 1].gen, d));
      if (i + 1 < ps.size()) CHECK(ps[i].norm <= ps[i + 1].norm);
    }
  }
}

TEST_CASE("unit orbit inverse-norm sum") {
  auto ctx = FieldCtx::make(3);
  // a = 1: sum over n of sech(2 n log eps)
  long double L = std::log(2.0L + std::sqrt(3.0L)), oracle = 0;
  for (int n = -40; n <= 40; ++n) oracle += 1 / std::cosh(2 * n * L);
  Real v1 = unit_orbit_inv_norm_sum(QuadInt(1, 0), ctx);
  CHECK(std::fabs(v1.to_ld() - oracle) < 1e-15L);
  CHECK(std::fabs(v1.to_double() - 1.3079277355015249) < 1e-13);  // frozen from the oracle

  QuadInt m(5, 3);
  Real a = unit_orbit_inv_norm_sum(m, ctx), b = unit_orbit_inv_norm_sum(mul(m, ctx.eps, 3), ctx);
  CHECK(abs(a - b) <= abs(a) * Real(1e-40, 192));

  Real n2 = unit_orbit_inv_norm_sum(QuadInt(1, 1), ctx);
  Real n200 = unit_orbit_inv_norm_sum(QuadInt(10, 10), ctx);
  CHECK(n2 >= n200 * 50L);

  std::mt19937_64 rng(14);
  for (long d : {3L, 7L, 11L}) {
    auto c = FieldCtx::make(d);
    long double Ld = c.log_eps.to_ld(), bound = 0;
    for (int n = -60; n <= 60; ++n) bound += 1 / std::cosh(2 * n * Ld);
    std::uniform_int_distribution<long> coord(-3000, 3000);
    for (int i = 0; i < 500; ++i) {
      QuadInt x(coord(rng), coord(rng));
      if (x.is_zero()) continue;
      Real v = unit_orbit_inv_norm_sum(x, c) * Real(norm(x, d), 192);
      CHECK(v.to_ld() <= bound * (1 + 1e-15L));
    }
  }
}
