#pragma once

#include "qda/quadfield.hpp"
#include "qda/real.hpp"

namespace qda {

struct RealPair {
  Real x1, x2;
  Bits precision_bits = 192;

  RealPair() = default;
  RealPair(Real a, Real b) : x1(std::move(a)), x2(std::move(b)), precision_bits(std::max(x1.prec(), x2.prec())) {}
  static RealPair parse(const std::string& s1, const std::string& s2, Bits prec) {
    return {Real::parse(s1, prec), Real::parse(s2, prec)};
  }
};

// True when (x1, x2) = (sigma_1(y), sigma_2(y)) for some y = (u + v sqrt d)/D,
// D <= den_max, to within 2^(-prec/2).
bool in_sigma_k(const RealPair& x, const FieldCtx& ctx, long den_max = 1000);

struct Shift {
  QuadInt p;
  Real err1, err2;
  const Real& max_err() const { return err1 < err2 ? err2 : err1; }
};

// Nearest point of sigma(p)/sigma(q) to (x1, x2): round the coordinates of
// x_i sigma_i(q) in the (1, +-sqrt d) basis, then take the best of the 3x3
// neighbours under max(err1, err2).
Shift nearest_shift(const QuadInt& q, const RealPair& x, const FieldCtx& ctx);

}  // namespace qda
