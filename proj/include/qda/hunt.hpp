#pragma once

#include <iosfwd>
#include <vector>

#include "qda/lattice.hpp"
#include "qda/quadfield.hpp"

namespace qda {

struct HuntRecord {
  long norm = 0;
  QuadInt gen;  // canonical generator times eps^k_offset
  int k_offset = 0;
  QuadInt p;
  Real err1, err2;
  double nu_eff = 0;  // -log(max err)/log norm - 1/2; +inf on an exact hit
  bool exact = false;
};

struct HuntResult {
  std::vector<HuntRecord> records;  // one per prime ideal, in prime order
  std::vector<HuntRecord> running;  // strictly increasing nu_eff prefix records
  bool degenerate = false;          // target lies in sigma(K)
  double median_abs_nu = 0;
  long skipped_ill_conditioned = 0;  // window generators past the 1e12 ratio
};

inline constexpr long kHuntNormMax = 100000000;

double nu_eff_of(const Real& max_err, long norm);

// Best shift over the generators canonical(pi) eps^k, |k| <= k_window, for
// every prime ideal of norm <= norm_max.
HuntResult scan(const RealPair& x, const FieldCtx& ctx, long norm_max, int k_window = 3, int workers = 1);

// Recompute err1, err2, nu_eff for the same (gen, p) at ctx's precision.
HuntRecord reevaluate(const HuntRecord& r, const RealPair& x, const FieldCtx& ctx);

void write_hunt_csv_header(std::ostream& os);
void write_hunt_csv_row(std::ostream& os, const HuntRecord& r);

}  // namespace qda
