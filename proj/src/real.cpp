#include "qda/real.hpp"

#include <algorithm>
#include <cstdlib>

#include "qda/errors.hpp"

namespace qda {

namespace {

template <class Fn>
Real binop(const Real& a, const Real& b, Fn fn) {
  Real r(std::max(a.prec(), b.prec()));
  fn(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

template <class Fn>
Real unop(const Real& a, Fn fn) {
  Real r(a.prec());
  fn(r.get(), a.get(), MPFR_RNDN);
  return r;
}

void widen(Real& a, const Real& b) {
  if (b.prec() > a.prec()) mpfr_prec_round(a.get(), b.prec(), MPFR_RNDN);
}

}  // namespace

Real Real::parse(std::string_view s, Bits prec) {
  Real r(prec);
  std::string tmp(s);
  char* end = nullptr;
  if (!tmp.empty()) mpfr_strtofr(r.v_, tmp.c_str(), &end, 10, MPFR_RNDN);
  if (end == nullptr || end == tmp.c_str() || *end != '\0')
    fail(ErrorKind::invalid_input, "cannot parse real '" + tmp + "'");
  return r;
}

__float128 Real::to_f128() const {
  // three doubles carry 159 bits, more than binary128 holds
  Real rest(*this);
  __float128 acc = 0;
  for (int i = 0; i < 3; ++i) {
    double part = mpfr_get_d(rest.v_, MPFR_RNDN);
    acc += part;
    mpfr_sub_d(rest.v_, rest.v_, part, MPFR_RNDN);
  }
  return acc;
}

mpz_class Real::floor_z() const {
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
  return z;
}

mpz_class Real::round_z() const {
  Real t(prec());
  mpfr_round(t.v_, v_);
  mpz_class z;
  mpfr_get_z(z.get_mpz_t(), t.v_, MPFR_RNDN);
  return z;
}

mpq_class Real::to_mpq() const {
  mpz_class m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), v_);
  mpq_class q(m);
  if (e >= 0)
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  else
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  return q;
}

std::string Real::str(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", digits - 1, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

std::string Real::fixed(int decimals) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rf", decimals, v_);
  std::string s(buf);
  mpfr_free_str(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);
  return s;
}

Real& Real::operator+=(const Real& o) {
  widen(*this, o);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  widen(*this, o);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  widen(*this, o);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  widen(*this, o);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real operator+(const Real& a, const Real& b) { return binop(a, b, mpfr_add); }
Real operator-(const Real& a, const Real& b) { return binop(a, b, mpfr_sub); }
Real operator*(const Real& a, const Real& b) { return binop(a, b, mpfr_mul); }
Real operator/(const Real& a, const Real& b) { return binop(a, b, mpfr_div); }

Real abs(const Real& x) { return unop(x, mpfr_abs); }
Real sqrt(const Real& x) { return unop(x, mpfr_sqrt); }
Real exp(const Real& x) { return unop(x, mpfr_exp); }
Real expm1(const Real& x) { return unop(x, mpfr_expm1); }
Real log(const Real& x) { return unop(x, mpfr_log); }
Real cos(const Real& x) { return unop(x, mpfr_cos); }
Real sin(const Real& x) { return unop(x, mpfr_sin); }
Real sqr(const Real& x) { return unop(x, mpfr_sqr); }

Real floor(const Real& x) {
  Real r(x.prec());
  mpfr_floor(r.get(), x.get());
  return r;
}

Real pow(const Real& x, long n) {
  Real r(x.prec());
  mpfr_pow_si(r.get(), x.get(), n, MPFR_RNDN);
  return r;
}

Real pi(Bits prec) {
  Real r(prec);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

Real sqrt_of(long n, Bits prec) {
  Real r(prec);
  mpfr_set_si(r.get(), n, MPFR_RNDN);
  mpfr_sqrt(r.get(), r.get(), MPFR_RNDN);
  return r;
}

Real sqrt_of(const mpz_class& n, Bits prec) {
  Real r(n, prec + 64);
  mpfr_sqrt(r.get(), r.get(), MPFR_RNDN);
  return r.with_prec(prec);
}

Real dist_to_int(const Real& x) {
  Real r(x.prec());
  mpfr_rint(r.get(), x.get(), MPFR_RNDN);
  mpfr_sub(r.get(), x.get(), r.get(), MPFR_RNDN);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  return r;
}

long double to_ld(const mpz_class& z) {
  if (mpz_fits_slong_p(z.get_mpz_t())) return static_cast<long double>(z.get_si());
  return Real(z, 128).to_ld();
}

__float128 to_f128(const mpz_class& z) {
  if (mpz_fits_slong_p(z.get_mpz_t())) return static_cast<__float128>(z.get_si());
  return Real(z, 160).to_f128();
}

}  // namespace qda
