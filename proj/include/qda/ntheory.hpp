#pragma once

// Rational-integer helpers: primality, factoring, modular roots.

#include <gmpxx.h>

#include <cstdint>
#include <utility>
#include <vector>

namespace qda {

using u64 = std::uint64_t;
using i64 = std::int64_t;

mpz_class isqrt(const mpz_class& n);
bool is_square(const mpz_class& n, mpz_class* root = nullptr);
u64 isqrt_u64(u64 n);

// Trial division by small primes, then Miller-Rabin with the first 20 primes
// as witnesses. Deterministic; exact below 3.3e24.
bool is_prime(const mpz_class& n);
bool is_prime_u64(u64 n);

const std::vector<u64>& small_primes();  // primes below 2^16

using Factorization = std::vector<std::pair<u64, int>>;
Factorization factor_u64(u64 n);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 a, u64 e, u64 m);
int legendre(i64 a, u64 p);  // p odd prime

// All x in [0, Q) with x^2 = d mod Q, ascending.
std::vector<u64> sqrt_mod(i64 d, u64 Q);

struct ExtGcd {
  mpz_class g, x, y;  // a*x + b*y = g >= 0
};
ExtGcd ext_gcd(const mpz_class& a, const mpz_class& b);

// floor and ceil of a/b for b != 0
mpz_class fdiv(const mpz_class& a, const mpz_class& b);
mpz_class cdiv(const mpz_class& a, const mpz_class& b);

bool is_squarefree(u64 n);

}  // namespace qda
