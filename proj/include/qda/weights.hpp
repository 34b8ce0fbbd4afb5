#pragma once

#include <iosfwd>
#include <random>
#include <vector>

#include "qda/lattice.hpp"
#include "qda/quadfield.hpp"

namespace qda {

inline constexpr int kDefaultCExp = 4;
// envelope exponent: Psi <= K exp(-pi D C norm/N) log N
inline constexpr double kEnvelopeD = 2.0;

struct WeightParams {
  long N = 1000;
  double delta = 1.0;
  int C_exp = kDefaultCExp;
  RealPair target;
  FieldCtx ctx;

  void validate() const;  // N >= 2, 1/N <= delta <= 1, C_exp >= 1
};

// (exp(-pi x^2) - exp(-2 pi x^2))^C
double smooth_f(double x, int C_exp);
long double smooth_f(long double x, int C_exp);
// K with f(x) <= K min(1, |x|^(2C)): e^-a - e^-2a <= min(a, 1/4) gives K = pi^C
double smooth_f_K(int C_exp);

struct Series {
  double value = 0;
  double tail = 0;  // bound on the dropped terms
};

struct PsiValue {
  long double psi = 0, psi_tilde = 0;  // long double so large-norm envelopes do not underflow
  double tail = 0;
  long terms = 0;
};
// Sum over all generators +-m eps^n of f(sigma_1/sqrt N) f(sigma_2/sqrt N).
PsiValue psi(const QuadInt& q, const WeightParams& P);

// Lattice sum over p in O, truncated where the Gaussian factor drops below
// trunc_tol. No unit balancing, so callers can test generator independence.
Series F_direct(const QuadInt& q, const WeightParams& P);

struct PoissonValue {
  double value = 0;      // real part, full sum
  double nonzero = 0;    // real part without p = 0
  double imag = 0;       // residue of the imaginary part
  double zero_term = 0;  // (norm/N) delta^2 / (2 sqrt d)
  double tail = 0;
  long terms = 0;
};
// Dual sum; throws precision_exhausted if the imaginary residue exceeds
// 1e-12 max(1, |value|).
PoissonValue F_poisson(const QuadInt& q, const WeightParams& P);

struct WeightSample {
  long ideal_norm = 0;
  QuadInt gen;
  double psi = 0, psi_tilde = 0, F_direct = 0, F_poisson = 0, omega = 0, omega_tilde = 0;
  double diff_def = 0;      // omega_tilde - omega
  double diff_poisson = 0;  // Psi delta^2/(2 sqrt d) times the p != 0 series
  double poisson_rel_err() const;
};
WeightSample weight_sample(const QuadInt& q, const WeightParams& P);

void write_weight_csv_header(std::ostream& os);
void write_weight_csv_row(std::ostream& os, const WeightSample& s);

struct PrimeSums {
  double T = 0, T_tilde = 0;
  double ratio = 0;  // T / (delta^2 N / log N)
  long ideals = 0;
  long norm_max = 0;
  double envelope_tail = 0;  // bound on omega_tilde summed over norms > norm_max
};
// Smallest norm_max whose envelope tail is below 1e-9.
long default_norm_max(const WeightParams& P);
double envelope_tail(const WeightParams& P, long norm_max);
// Throws truncation_insufficient if envelope_tail(norm_max) >= 1e-9.
PrimeSums prime_sums(const WeightParams& P, long norm_max, int workers = 1);

// Random canonical q with 1 <= norm <= norm_max, for sampling.
QuadInt random_generator(std::mt19937_64& rng, const FieldCtx& ctx, long norm_max);

// Seeded samples over d in {3,7,11}, N in {100, 1000}, delta in {0.25, 1}:
// per_config random canonical q of norm <= 1e4 with targets in [0,1)^2.
struct WeightCase {
  long d, N;
  double delta;
  QuadInt q;
  double x1, x2;
};
std::vector<WeightCase> weights_corpus(int per_config, std::uint64_t seed);
WeightParams params_for(const WeightCase& c, Bits prec = 128);

// Every canonical generator with norm in [lo, hi].
std::vector<QuadInt> canonical_generators(const FieldCtx& ctx, long lo, long hi);

}  // namespace qda
