#pragma once

#include <gmpxx.h>

#include <array>
#include <iosfwd>
#include <vector>

#include "qda/ntheory.hpp"

namespace qda {

// a x^2 + 2 h x y + b y^2, discriminant h^2 - a b.
struct QuadForm {
  mpz_class a, h, b;

  mpz_class disc() const { return h * h - a * b; }
  mpz_class eval(const mpz_class& x, const mpz_class& y) const { return a * x * x + 2 * h * x * y + b * y * y; }
  friend bool operator==(const QuadForm& f, const QuadForm& g) { return f.a == g.a && f.h == g.h && f.b == g.b; }
};

// Row-major 2x2 integer matrix.
struct Mat2 {
  mpz_class m00 = 1, m01 = 0, m10 = 0, m11 = 1;

  mpz_class det() const { return m00 * m11 - m01 * m10; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.m00 * y.m00 + x.m01 * y.m10, x.m00 * y.m01 + x.m01 * y.m11, x.m10 * y.m00 + x.m11 * y.m10,
            x.m10 * y.m01 + x.m11 * y.m11};
  }
  friend bool operator==(const Mat2& x, const Mat2& y) {
    return x.m00 == y.m00 && x.m01 == y.m01 && x.m10 == y.m10 && x.m11 == y.m11;
  }
};

// (F o M)(v) = F(M v)
QuadForm transform(const QuadForm& f, const Mat2& m);
bool is_reduced(const QuadForm& f, long d);

std::vector<u64> sqrt_mod_checked(long d, const mpz_class& Q);
QuadForm form_from_root(const mpz_class& Q, const mpz_class& omega, long d);

struct PellSolution {
  mpz_class T, U;
};
PellSolution pell_least(const mpz_class& m, long d, long u_budget = 10000000);

struct Reduction {
  QuadForm form;  // reduced, a > 0 > b
  Mat2 P;         // form = start o P
  int steps = 0;
};
Reduction reduce_form(const QuadForm& start, long d);

// All reduced forms of discriminant d with a > 0.
std::vector<QuadForm> reduced_forms(long d);

struct SectorData {
  mpq_class Y;      // aU / (T - hU)
  mpq_class eta1;   // min of a + 2 h y + b y^2 on [0, Y]
  mpq_class eta2;   // max
  PellSolution pell;
};
SectorData sector_data(const QuadForm& reduced, long d);

struct RootApprox {
  mpz_class Q, omega, u, r;
  mpq_class err;       // |omega/Q - u/r|
  mpq_class residual;  // (h r + b s) / (r Q)
  // provenance
  QuadForm reduced;
  mpz_class s, alpha, beta;
  int walk_steps = 0;
};
RootApprox approx_root(const mpz_class& Q, const mpz_class& omega, long d);

struct RootConstants {
  double c1, c2, c3;
};
// Frozen per-d constants of the root error contract (d in {3, 7, 11}).
RootConstants root_constants(long d);
// Analytic constants from the sector extrema over all reduced forms.
RootConstants analytic_root_constants(long d);

bool satisfies_contract(const RootApprox& ra, const RootConstants& c);

void write_root_csv_header(std::ostream& os);
void write_root_csv_row(std::ostream& os, const RootApprox& ra);

}  // namespace qda
