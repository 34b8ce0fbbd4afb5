#pragma once

// Thin RAII wrapper over mpfr_t. Every value carries its own precision;
// binary operations round to the larger operand precision, so there is no
// global default to race on across worker threads.

#include <mpfr.h>
#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace qda {

using Bits = mpfr_prec_t;

class Real {
 public:
  Real() : Real(53) {}
  explicit Real(Bits prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(long x, Bits prec) : Real(prec) { mpfr_set_si(v_, x, MPFR_RNDN); }
  Real(double x, Bits prec) : Real(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
  Real(const mpz_class& x, Bits prec) : Real(prec) { mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN); }
  Real(const mpq_class& x, Bits prec) : Real(prec) { mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN); }
  static Real parse(std::string_view s, Bits prec);

  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  Bits prec() const { return mpfr_get_prec(v_); }
  Real with_prec(Bits p) const {
    Real r(p);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  int sign() const { return mpfr_sgn(v_); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_ld() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  __float128 to_f128() const;
  mpz_class floor_z() const;
  mpz_class round_z() const;  // nearest, ties away from zero
  mpq_class to_mpq() const;   // exact value of the binary float

  // Scientific notation with `digits` significant digits.
  std::string str(int digits = 30) const;
  // Fixed notation with `decimals` digits after the point.
  std::string fixed(int decimals) const;

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long k) {
    mpfr_mul_si(v_, v_, k, MPFR_RNDN);
    return *this;
  }
  Real& operator/=(long k) {
    mpfr_div_si(v_, v_, k, MPFR_RNDN);
    return *this;
  }

  friend Real operator-(const Real& a) {
    Real r(a.prec());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator*(const Real& a, long k) { return Real(a) *= k; }
  friend Real operator*(long k, const Real& a) { return Real(a) *= k; }
  friend Real operator/(const Real& a, long k) { return Real(a) /= k; }

  friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) {
    if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
    int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real expm1(const Real& x);
Real log(const Real& x);
Real cos(const Real& x);
Real sin(const Real& x);
Real floor(const Real& x);
Real pow(const Real& x, long n);
Real sqr(const Real& x);

Real pi(Bits prec);
Real sqrt_of(long n, Bits prec);
Real sqrt_of(const mpz_class& n, Bits prec);

// Distance to the nearest integer.
Real dist_to_int(const Real& x);

// Correctly rounded conversions of big integers.
long double to_ld(const mpz_class& z);
__float128 to_f128(const mpz_class& z);

}  // namespace qda
