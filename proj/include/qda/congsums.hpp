#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "qda/ntheory.hpp"
#include "qda/qforms.hpp"
#include "qda/real.hpp"

namespace qda {

// Counting box and congruence bB = aA (mod W).
struct ThetaQuery {
  i64 X = 0;
  i64 a = 0, b = 0, W = 1;
  // Z = gcd(f, g) of the approximant the query came from; 0 means "derive it"
  // as the largest Z with Z | a, Z | b, Z^2 | W.
  i64 Z = 0;
};

enum class ThetaCase { b_invertible, a_divisible };

struct ThetaReduced {
  i64 Z, ap, bp, Wp;  // a', b', W'
  ThetaCase kind;
  // root of x^2 = d mod M: a' inv(b') mod W' or b' inv(a'') mod W''
  i64 omega;
  i64 M;
};

inline constexpr i64 kThetaBudget = 1000000;
inline constexpr i64 kSystemBudget = 1000;
inline constexpr i64 kKernelHMax = 10000000;
// implied constant of the certificate |gamma - u/r| <= c / r^2
inline constexpr double kKernelCertC = 50.0;

// Number of x in [lo, hi] with x = res (mod m), m >= 1.
i64 count_progression(i64 lo, i64 hi, i64 res, i64 m);

i64 derive_z(i64 a, i64 b, i64 W);
bool is_conformant(i64 a, i64 b, i64 W, long d);
// Throws inverse_nonexistent when neither case applies.
ThetaReduced reduce_query(const ThetaQuery& q, long d);

// Query built from the approximant (u + v sqrt d)/(f + g sqrt d).
ThetaQuery query_from_approximant(i64 u, i64 v, i64 f, i64 g, long d, i64 X);

i64 theta_count(const ThetaQuery& q);
// Count modulo an arbitrary modulus, used for the W' vs W'Z comparison.
i64 theta_count_mod(i64 X, i64 a, i64 b, i64 M);

struct ThetaBound {
  i64 count;
  double bound, ratio;
  ThetaReduced reduced;
  std::optional<RootApprox> root;  // for the reduced root when M >= 2
};
ThetaBound theta_bound_check(const ThetaQuery& q, long d);

// sum_{0 <= h <= H} min(X, ||h gamma||^-1), with min(X, inf) = X.
Real kernel_sum(double H, double X, const Real& gamma);
// gamma = num/den exactly; distances computed in integers.
Real kernel_sum_rational(double H, double X, const mpz_class& num, const mpz_class& den, long prec = 128);

struct KernelBound {
  double sum, bound, ratio, cert;  // cert = r^2 |gamma - u/r|
};
KernelBound kernel_bound_check(double H, double X, const Real& gamma, const mpz_class& u, const mpz_class& r);
KernelBound kernel_bound_check_rational(double H, double X, const mpq_class& gamma, const mpz_class& u,
                                        const mpz_class& r);

// (lambda, mu, alpha, beta) with |lambda|, |mu| <= U, |alpha|, |beta| <= V and
// a lambda + b d mu = alpha, b lambda + a mu = beta (mod W).
i64 system_count(i64 U, i64 V, i64 a, i64 b, i64 W, long d);

struct ExclusionReport {
  bool only_trivial;               // no solution with (lambda, mu) != (0, 0)
  std::optional<bool> predicted;   // empty when the thresholds do not apply
  double threshold;                // c_excl sqrt(W')
  std::array<i64, 4> witness{};    // first nontrivial solution found
  bool mismatch() const { return predicted && *predicted && !only_trivial; }
};
// Threshold constant from the frozen root constants of d.
double exclusion_constant(long d);
ExclusionReport small_k_exclusion_check(i64 Uq, i64 Vq, i64 a, i64 b, i64 W, long d);

// Seeded corpora shared by fitting and acceptance.
std::vector<ThetaQuery> conformant_corpus(long d, int n, i64 W_max, i64 X_max, std::uint64_t seed);

struct KernelInput {
  double H, X;
  mpq_class gamma;
  mpz_class u, r;
};
std::vector<KernelInput> kernel_corpus(int n, std::uint64_t seed);

void write_theta_csv_header(std::ostream& os);
void write_theta_csv_row(std::ostream& os, const ThetaQuery& q, const ThetaBound& tb);

}  // namespace qda
