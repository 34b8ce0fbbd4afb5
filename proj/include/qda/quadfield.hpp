#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "qda/real.hpp"

namespace qda {

// a + b*sqrt(d); d lives in FieldCtx.
struct QuadInt {
  mpz_class a = 0, b = 0;

  QuadInt() = default;
  QuadInt(mpz_class a_, mpz_class b_) : a(std::move(a_)), b(std::move(b_)) {}
  QuadInt(long a_, long b_ = 0) : a(a_), b(b_) {}

  bool is_zero() const { return a == 0 && b == 0; }
  QuadInt conj() const { return {a, -b}; }
  QuadInt operator-() const { return {-a, -b}; }
  friend QuadInt operator+(const QuadInt& x, const QuadInt& y) { return {x.a + y.a, x.b + y.b}; }
  friend QuadInt operator-(const QuadInt& x, const QuadInt& y) { return {x.a - y.a, x.b - y.b}; }
  friend bool operator==(const QuadInt& x, const QuadInt& y) { return x.a == y.a && x.b == y.b; }
};

std::string to_string(const QuadInt& x, long d);

mpz_class norm_signed(const QuadInt& x, long d);  // a^2 - d b^2
mpz_class norm(const QuadInt& x, long d);         // |a^2 - d b^2|
QuadInt mul(const QuadInt& x, const QuadInt& y, long d);
// x / y when y | x in Z[sqrt d]; returns false otherwise.
bool exact_div(const QuadInt& x, const QuadInt& y, long d, QuadInt* quot = nullptr);
bool divides(const QuadInt& y, const QuadInt& x, long d);
bool associates(const QuadInt& x, const QuadInt& y, long d);

// Pell scan over u = 1, 2, ...; throws when d is a square or d < 2.
QuadInt fundamental_unit(long d);
// Independent brute-force oracle, scanning u up to u_max.
QuadInt fundamental_unit_bruteforce(long d, long u_max = 1000000);

struct FieldCtx {
  long d = 3;
  QuadInt eps;
  int eps_norm = 1;  // sign of N(eps)
  QuadInt eps_inv;
  Bits precision_bits = 192;
  double trunc_tol = 1e-30;
  Real sqrt_d;
  Real eps_real;  // sigma_1(eps)
  Real log_eps;

  static FieldCtx make(long d, Bits precision_bits = 192, double trunc_tol = 1e-30);
  FieldCtx with_precision(Bits bits) const { return make(d, bits, trunc_tol); }

  QuadInt mul(const QuadInt& x, const QuadInt& y) const { return qda::mul(x, y, d); }
  mpz_class norm(const QuadInt& x) const { return qda::norm(x, d); }
  QuadInt unit_pow(long k) const;  // eps^k, k may be negative

  Real sigma1(const QuadInt& x) const;
  Real sigma2(const QuadInt& x) const;
  std::pair<Real, Real> embed(const QuadInt& x) const;
};

// Robust embeddings in arbitrary float types: the cancelling conjugate is
// recovered as N(x) / (the non-cancelling one).
template <class T>
std::pair<T, T> embed_as(const QuadInt& x, const T& sqrt_d, long d, T (*conv)(const mpz_class&)) {
  if (x.is_zero()) return {T(0), T(0)};
  T a = conv(x.a), b = conv(x.b);
  T n = conv(norm_signed(x, d));
  if (sgn(x.a) * sgn(x.b) >= 0) {
    T s1 = a + b * sqrt_d;
    return {s1, n / s1};
  }
  T s2 = a - b * sqrt_d;
  return {n / s2, s2};
}

struct Balanced {
  long k = 0;
  QuadInt m_bal;  // m * eps^k
};

// m * eps^k with |sigma_2/sigma_1| in [1/eps, eps).
Balanced balance_unit(const QuadInt& m, const FieldCtx& ctx);
// balance_unit plus sign so that sigma_1 > 0: the canonical generator of (m).
QuadInt canonical(const QuadInt& m, const FieldCtx& ctx);
bool in_fundamental_domain(const QuadInt& m, const FieldCtx& ctx);

QuadInt euclid_gcd(const QuadInt& p, const QuadInt& q, const FieldCtx& ctx);

enum class PrimeKind { split, inert, ramified };
const char* to_string(PrimeKind k);

struct PrimeElem {
  QuadInt gen;
  mpz_class norm;
  PrimeKind kind;
  mpz_class rational_prime;
};

std::vector<PrimeElem> enumerate_prime_elements(const FieldCtx& ctx, long norm_max);
// Generator of norm +-p (p = 2, p | d, or p split). Throws generator_not_found.
QuadInt prime_generator(long p, const FieldCtx& ctx);
void write_prime_csv(std::ostream& os, const std::vector<PrimeElem>& ps);

// Sum of 1/(sigma_1(q)^2 + sigma_2(q)^2) over all generators q = +-a eps^n.
Real unit_orbit_inv_norm_sum(const QuadInt& a, const FieldCtx& ctx);

}  // namespace qda
