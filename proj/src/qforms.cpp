#include "qda/qforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "qda/constants.hpp"
#include "qda/errors.hpp"

namespace qda {

QuadForm transform(const QuadForm& f, const Mat2& m) {
  // F(m00 x + m01 y, m10 x + m11 y)
  const auto &p = m.m00, &q = m.m01, &r = m.m10, &s = m.m11;
  return {f.a * p * p + 2 * f.h * p * r + f.b * r * r,
          f.a * p * q + f.h * (p * s + q * r) + f.b * r * s,
          f.a * q * q + 2 * f.h * q * s + f.b * s * s};
}

bool is_reduced(const QuadForm& f, long d) {
  // |sqrt d - |a|| < h < sqrt d, decided in integers
  if (f.h <= 0 || f.h * f.h >= d) return false;
  mpz_class aa = abs(f.a);
  mpz_class lo = aa + f.h;  // > sqrt d
  if (lo * lo <= d) return false;
  mpz_class hi = aa - f.h;  // < sqrt d
  return hi <= 0 || hi * hi < d;
}

std::vector<u64> sqrt_mod_checked(long d, const mpz_class& Q) {
  require(Q >= 1, "Q must be >= 1");
  require(mpz_fits_ulong_p(Q.get_mpz_t()) != 0, "Q exceeds 64 bits");
  return sqrt_mod(d, Q.get_ui());
}

QuadForm form_from_root(const mpz_class& Q, const mpz_class& omega, long d) {
  require(Q >= 1, "Q must be >= 1");
  mpz_class num = omega * omega - d;
  if (!mpz_divisible_p(num.get_mpz_t(), Q.get_mpz_t()))
    fail(ErrorKind::invalid_input, "root-invalid: omega^2 != d mod Q");
  mpz_class c;
  mpz_divexact(c.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
  return {Q, omega, c};
}

PellSolution pell_least(const mpz_class& m, long d, long u_budget) {
  require(m >= 1, "pell_least needs m >= 1");
  for (long U = 1; U <= u_budget; ++U) {
    mpz_class t2 = m + mpz_class(d) * U * U, T;
    if (is_square(t2, &T)) return {T, mpz_class(U)};
  }
  fail(ErrorKind::no_solution, "no Pell solution within budget");
}

namespace {

// rho step: (a, h, b) -> (b, h', a') with h' = b t - h normalized
Mat2 rho_matrix(const QuadForm& f, long d, const mpz_class& s) {
  const mpz_class& b = f.b;
  mpz_class ab = abs(b), hp;
  // the (a, 2h, b) form has discriminant 4d, hence the 2 sqrt d threshold
  if (ab * ab > 4 * d) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), mpz_class(-f.h).get_mpz_t(), ab.get_mpz_t());
    hp = 2 * r > ab ? mpz_class(r - ab) : r;
  } else {
    // largest h' <= floor(sqrt d) with h' = -h mod |b|
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), mpz_class(s + f.h).get_mpz_t(), ab.get_mpz_t());
    hp = s - r;
  }
  mpz_class t;
  mpz_divexact(t.get_mpz_t(), mpz_class(hp + f.h).get_mpz_t(), b.get_mpz_t());
  return {0, -1, 1, t};
}

}  // namespace

Reduction reduce_form(const QuadForm& start, long d) {
  require(start.disc() == d, "form discriminant differs from d");
  const mpz_class s = isqrt(mpz_class(d));
  Reduction red{start, Mat2{}, 0};
  for (int it = 0; it < 100000; ++it) {
    if (is_reduced(red.form, d) && red.form.a > 0) return red;
    Mat2 S = rho_matrix(red.form, d, s);
    red.form = transform(red.form, S);
    red.P = red.P * S;
    ++red.steps;
  }
  fail(ErrorKind::representation_not_found, "form reduction did not terminate");
}

std::vector<QuadForm> reduced_forms(long d) {
  std::vector<QuadForm> out;
  long s = static_cast<long>(isqrt(mpz_class(d)).get_si());
  for (long h = 1; h <= s; ++h) {
    long num = h * h - d;  // = a b < 0
    for (long a = 1; a <= -num; ++a) {
      if ((-num) % a) continue;
      QuadForm f{a, h, num / a};
      if (is_reduced(f, d)) out.push_back(f);
    }
  }
  return out;
}

SectorData sector_data(const QuadForm& f, long d) {
  require(f.a > 0 && f.b < 0, "sector needs a > 0 > b");
  SectorData sd;
  sd.pell = pell_least(gcd(gcd(f.a, f.h), f.b), d);
  const auto& T = sd.pell.T;
  const auto& U = sd.pell.U;
  mpz_class den = T - f.h * U;
  require(den > 0, "T - hU must be positive for a reduced form");
  sd.Y = mpq_class(f.a * U, den);
  sd.Y.canonicalize();
  auto g = [&](const mpq_class& y) -> mpq_class { return mpq_class(f.a) + 2 * mpq_class(f.h) * y + mpq_class(f.b) * y * y; };
  mpq_class g0 = g(0), gY = g(sd.Y);
  sd.eta1 = std::min(g0, gY);
  sd.eta2 = std::max(g0, gY);
  mpq_class vertex(f.h, -f.b);  // concave since b < 0
  vertex.canonicalize();
  if (vertex > 0 && vertex < sd.Y) sd.eta2 = std::max(sd.eta2, g(vertex));
  return sd;
}

RootApprox approx_root(const mpz_class& Q, const mpz_class& omega, long d) {
  require(Q >= 2, "approx_root needs Q >= 2");
  QuadForm f0 = form_from_root(Q, omega, d);
  Reduction red = reduce_form(f0, d);
  const QuadForm& f = red.form;
  if (!(transform(f0, red.P) == f)) fail(ErrorKind::representation_not_found, "tracked matrix mismatch");

  // F0 = F o M with M = P^-1 (det P = 1)
  Mat2 M{red.P.m11, -red.P.m01, -red.P.m10, red.P.m00};
  if (M.m00 < 0) M = Mat2{-M.m00, -M.m01, -M.m10, -M.m11};

  SectorData sd = sector_data(f, d);
  const auto& T = sd.pell.T;
  const auto& U = sd.pell.U;
  Mat2 A{T - f.h * U, -f.b * U, f.a * U, T + f.h * U};
  Mat2 Ainv{T + f.h * U, f.b * U, -f.a * U, T - f.h * U};
  const mpz_class Ynum = f.a * U, Yden = T - f.h * U;

  int walk = 0;
  for (;; ++walk) {
    if (walk > 100000) fail(ErrorKind::representation_not_found, "sector walk did not terminate");
    const mpz_class& r = M.m00;
    const mpz_class& s = M.m10;
    if (s <= 0)
      M = A * M;
    else if (s * Yden > Ynum * r)
      M = Ainv * M;
    else
      break;
  }

  RootApprox ra;
  ra.Q = Q;
  ra.omega = omega;
  ra.reduced = f;
  ra.walk_steps = walk;
  ra.r = M.m00;
  ra.s = M.m10;
  ra.beta = M.m01;
  ra.alpha = M.m11;
  if (!(transform(f, M) == f0) || f.eval(ra.r, ra.s) != Q)
    fail(ErrorKind::representation_not_found, "representation check failed");

  // independent route to beta: extended gcd, then shift by the xy coefficient
  ExtGcd eg = ext_gcd(ra.r, -ra.s);  // r*x + (-s)*y = 1, alpha0 = x, beta0 = y
  if (eg.g != 1) fail(ErrorKind::representation_not_found, "gcd(r, s) != 1");
  mpz_class alpha0 = eg.x, beta0 = eg.y;
  mpz_class expr0 = f.a * ra.r * beta0 + f.h * (ra.r * alpha0 + ra.s * beta0) + f.b * ra.s * alpha0;
  mpz_class diff = omega - expr0;
  if (!mpz_divisible_p(diff.get_mpz_t(), Q.get_mpz_t()))
    fail(ErrorKind::representation_not_found, "xy-coefficient shift is not integral");
  mpz_class t;
  mpz_divexact(t.get_mpz_t(), diff.get_mpz_t(), Q.get_mpz_t());
  if (beta0 + t * ra.r != ra.beta || alpha0 + t * ra.s != ra.alpha)
    fail(ErrorKind::representation_not_found, "extended-gcd route disagrees with the tracked matrix");
  if (f.a * ra.r * ra.beta + f.h * (ra.r * ra.alpha + ra.s * ra.beta) + f.b * ra.s * ra.alpha != omega)
    fail(ErrorKind::representation_not_found, "xy-coefficient identity fails");

  ra.u = ra.beta;
  ra.residual = mpq_class(f.h * ra.r + f.b * ra.s, ra.r * Q);
  ra.residual.canonicalize();
  mpq_class lhs(omega, Q), approx(ra.u, ra.r);
  lhs.canonicalize();
  approx.canonicalize();
  if (lhs != approx + ra.residual) fail(ErrorKind::representation_not_found, "exact identity omega/Q = u/r + residual fails");
  ra.err = abs(lhs - approx);
  return ra;
}

RootConstants root_constants(long d) {
  for (const auto& c : kRootConstants)
    if (c.d == d) return {c.c1, c.c2, c.c3};
  fail(ErrorKind::unsupported_d, "no frozen root constants for d=" + std::to_string(d));
}

RootConstants analytic_root_constants(long d) {
  RootConstants out{1e300, 0, 0};
  for (const auto& f : reduced_forms(d)) {
    SectorData sd = sector_data(f, d);
    double e1 = sd.eta1.get_d(), e2 = sd.eta2.get_d();
    out.c1 = std::min(out.c1, 1 / std::sqrt(e2));
    out.c2 = std::max(out.c2, 1 / std::sqrt(e1));
    double c3 = (std::fabs(f.h.get_d()) + std::fabs(f.b.get_d()) * sd.Y.get_d()) / e1;
    out.c3 = std::max(out.c3, c3);
  }
  return out;
}

bool satisfies_contract(const RootApprox& ra, const RootConstants& c) {
  if (gcd(ra.u, ra.r) != 1 || ra.r < 1) return false;
  // c1^2 Q <= r^2 <= c2^2 Q in doubles with exact integer inputs
  double r = ra.r.get_d(), q = ra.Q.get_d();
  double ratio = r / std::sqrt(q);
  if (ratio < c.c1 || ratio > c.c2) return false;
  mpq_class scaled = ra.err * ra.r * ra.r;
  return scaled.get_d() <= c.c3;
}

void write_root_csv_header(std::ostream& os) { os << "Q,omega,u,r,err_num,err_den,r_over_sqrtQ\n"; }

void write_root_csv_row(std::ostream& os, const RootApprox& ra) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", ra.r.get_d() / std::sqrt(ra.Q.get_d()));
  os << ra.Q << ',' << ra.omega << ',' << ra.u << ',' << ra.r << ',' << ra.err.get_num() << ',' << ra.err.get_den()
     << ',' << buf << '\n';
}

}  // namespace qda
