#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qda/quadfield.hpp"
#include "qda/weights.hpp"

namespace qda {

// (prime index, exponent), sorted by prime index
using IdealKey = std::vector<std::pair<int, int>>;

struct IdealRec {
  long norm = 1;
  QuadInt gen{1};  // canonical generator
  std::vector<std::pair<PrimeElem, int>> factorization;
  IdealKey key;
};

int mobius_ideal(const IdealRec& a);

// Every ideal of norm <= norm_max with its factorization. Primes carry
// canonical generators in the default order (norm, |a|, a, b).
struct IdealTable {
  FieldCtx ctx;
  long norm_max = 0;
  std::vector<PrimeElem> primes;
  std::vector<IdealRec> ideals;  // sorted by (norm, key); ideals[0] is the unit ideal

  static IdealTable build(const FieldCtx& ctx, long norm_max);
  int find(const IdealKey& key) const;  // -1 when absent (norm beyond norm_max)
  int find_gen(const QuadInt& g) const;
  int prime_count_below(double z) const;  // primes of norm < z

 private:
  std::map<IdealKey, int> index_;
};

// Finitely supported weight: ideal index -> value. Doubles are exact
// rationals, so real weights go through mpq without loss.
using IdealWeight = std::map<int, mpq_class>;

mpq_class s_of_w(const IdealTable& T, const IdealWeight& w, double z);
// Throws too_many_primes when 2^(primes below z) > 1e6.
mpq_class s_via_mobius(const IdealTable& T, const IdealWeight& w, double z);

struct SieveParams {
  double x = 100, mu = 0.5, kappa = 0.5, M = 20;
  double z() const;
  void validate() const;  // x >= 3, 0 < mu < 1, 0 < kappa <= 1/2, x^mu < M < x
};

// Indices of the primes of norm < z, in the default order or with ties in
// norm reversed.
std::vector<int> default_order(const IdealTable& T, double z);
std::vector<int> reversed_tie_order(const IdealTable& T, double z);

struct BuchstabReport {
  mpq_class direct;    // sum over d | P(z) of mu(d) g(d)
  mpq_class buchstab;  // iterated decomposition over P_s, s <= t
  int t = 0;           // floor(log x / log 2) + 1
  int max_q_depth = 0;  // deepest Q_s tuple met
  bool q_t_empty = false;
  long tuples = 0;
  bool match() const { return direct == buchstab; }
};
// g must vanish on norms <= x^mu (invalid_input otherwise); order must list
// each prime of norm < z once with norms nondecreasing (order_violation).
BuchstabReport buchstab_check(const IdealTable& T, const IdealWeight& g, const SieveParams& p,
                              const std::vector<int>& order);

struct TypeSplit {
  mpq_class sharp, flat, direct;  // direct = S(omega, z) - S(omega_tilde, z)
  double rel_err() const;
};
TypeSplit type_split(const IdealTable& T, const IdealWeight& omega, const IdealWeight& omega_tilde,
                     const SieveParams& p);

// omega and omega_tilde on every ideal of T; throws truncation_insufficient
// when the envelope beyond T.norm_max is not below 1e-9.
std::pair<IdealWeight, IdealWeight> omega_weights(const IdealTable& T, const WeightParams& P, int workers = 1);

std::string buchstab_json(const IdealTable& T, const BuchstabReport& r, const SieveParams& p);

}  // namespace qda
