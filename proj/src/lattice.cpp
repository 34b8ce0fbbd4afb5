#include "qda/lattice.hpp"

#include "qda/errors.hpp"

namespace qda {

bool in_sigma_k(const RealPair& x, const FieldCtx& ctx, long den_max) {
  const Bits p = std::max(x.precision_bits, ctx.precision_bits);
  Real sd = sqrt_of(ctx.d, p);
  Real tol(1L, p);
  mpfr_mul_2si(tol.get(), tol.get(), -static_cast<long>(p / 2), MPFR_RNDN);
  Real s = x.x1.with_prec(p) + x.x2.with_prec(p), t = (x.x1.with_prec(p) - x.x2.with_prec(p)) / sd;
  for (long D = 1; D <= den_max; ++D) {
    // u = D (x1 + x2)/2, v = D (x1 - x2)/(2 sqrt d)
    Real u = s * D / 2L, v = t * D / 2L;
    if (dist_to_int(u) <= tol && dist_to_int(v) <= tol) return true;
  }
  return false;
}

Shift nearest_shift(const QuadInt& q, const RealPair& x, const FieldCtx& ctx) {
  if (q.is_zero()) fail(ErrorKind::invalid_input, "nearest_shift: q = 0");
  const Bits p = ctx.precision_bits;
  auto [s1, s2] = ctx.embed(q);
  Real ratio = abs(s1 / s2);
  if (ratio > Real(1e12, p) || ratio < Real(1e-12, p))
    fail(ErrorKind::ill_conditioned, "nearest_shift: conjugate ratio beyond 1e12, rebalance q");
  Real y1 = x.x1.with_prec(p) * s1, y2 = x.x2.with_prec(p) * s2;
  mpz_class u0 = ((y1 + y2) / 2L).round_z();
  mpz_class v0 = ((y1 - y2) / (ctx.sqrt_d * 2L)).round_z();
  Shift best;
  bool have = false;
  for (long du = -1; du <= 1; ++du)
    for (long dv = -1; dv <= 1; ++dv) {
      QuadInt c(u0 + du, v0 + dv);
      Real cu(c.a, p), cv(c.b, p);
      Real e1 = abs(x.x1.with_prec(p) - (cu + cv * ctx.sqrt_d) / s1);
      Real e2 = abs(x.x2.with_prec(p) - (cu - cv * ctx.sqrt_d) / s2);
      Real m = e1 < e2 ? e2 : e1;
      if (!have || m < best.max_err()) {
        best = {c, std::move(e1), std::move(e2)};
        have = true;
      }
    }
  return best;
}

}  // namespace qda
