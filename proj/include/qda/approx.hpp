#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <optional>
#include <vector>

#include "qda/lattice.hpp"
#include "qda/quadfield.hpp"
#include "qda/real.hpp"

namespace qda {

enum class ApproxCase { b_invertible, a_divisible };
const char* to_string(ApproxCase c);

// (u + v sqrt d)/(f + g sqrt d) with a + b sqrt d = (u + v sqrt d)(f - g sqrt d).
struct Approximant {
  mpz_class u, v, f, g;
  mpz_class W, Z, a, b;
  mpz_class ap, bp, Wp;  // a/Z, b/Z, W/Z^2
  ApproxCase kind = ApproxCase::b_invertible;
  // whether each of gcd(b', W') = 1 and gcd(a', W') = d holds
  bool b_coprime = false, a_gcd_d = false;
};

// Throws not_coprime when gcd(u + v sqrt d, f + g sqrt d) is not a unit;
// check_coprime = false skips that test for callers that already know it.
Approximant reduce_approximant(const mpz_class& u, const mpz_class& v, const mpz_class& f, const mpz_class& g,
                               const FieldCtx& ctx, bool check_coprime = true);

void write_approximant_csv_header(std::ostream& os);
void write_approximant_csv_row(std::ostream& os, const Approximant& a);

struct Convergent {
  QuadInt p, q;
};
// p_0 = a_0, q_0 = 1, p_1 = a_0 a_1 + 1, q_1 = a_1, then the three-term
// recurrence. Partials from index 1 on must have both embeddings > 0.
std::vector<Convergent> cf_convergents(const std::vector<QuadInt>& partials, const FieldCtx& ctx);

struct StepCheck {
  int k;
  bool prime_fk, gcd_fk_gk, gcd_fk_fk1, fk_gt_dgk, fk_gt_fk1_sq, cond_gt, conj_positive;
  bool det_identity;
  bool conv_bound1, conv_bound2;  // |x_i - p_{k-1}/q_{k-1}| <= 1/(q_k q_{k-1}) per embedding
  bool ok() const {
    return prime_fk && gcd_fk_gk && gcd_fk_fk1 && fk_gt_dgk && fk_gt_fk1_sq && cond_gt && conj_positive && det_identity &&
           conv_bound1 && conv_bound2;
  }
};

struct GoodPair {
  long d = 3;
  int steps = 0;             // constructed partials a_2 .. a_{steps+1}
  RealPair x;
  std::vector<QuadInt> partials;          // every partial used for x, a_0 .. a_K
  std::vector<Convergent> convergents;    // same length as partials
  std::vector<Approximant> approximants;  // q_1 .. q_{steps+1}
  std::vector<StepCheck> checks;          // k = 2 .. steps+1
  long candidates_tested = 0;
};

inline constexpr long kDefaultPrimeBudget = 1000000;

GoodPair construct_good_pair(const FieldCtx& ctx, int steps, long prime_search_budget = kDefaultPrimeBudget);
// x1, x2 to `digits` decimals, partials as [s, t] pairs.
std::string good_pair_json(const GoodPair& gp, int digits);
RealPair target_from_json(const std::string& text, Bits prec);

struct DirichletHit {
  Approximant ap;
  Real err1, err2;
  double c1, c2;  // err_i |sigma_i(q)| (|sigma_1(q)| + |sigma_2(q)|)
};
struct DirichletResult {
  std::vector<DirichletHit> hits;  // sorted by (W, |f|, f, g)
  double c_search = 0;             // max over hits of max(c1, c2)
};
inline constexpr double kDefaultCSearch = 10.0;

DirichletResult dirichlet_search(const RealPair& x, const FieldCtx& ctx, long W_min, long W_max,
                                 double c_bound = kDefaultCSearch, int workers = 1);

struct EtaRow {
  mpz_class W, Z;
  double ratio;     // log Z / log W, 0 when Z = 1
  double tail_inf;  // min of ratio over this and all later rows
};
std::vector<EtaRow> eta_goodness_scan(const RealPair& x, const FieldCtx& ctx, long W_max, int workers = 1);

}  // namespace qda
