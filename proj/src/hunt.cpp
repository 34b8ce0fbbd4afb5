#include "qda/hunt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <thread>

#include "qda/errors.hpp"

namespace qda {

double nu_eff_of(const Real& max_err, long norm) {
  if (max_err.is_zero()) return std::numeric_limits<double>::infinity();
  return -static_cast<double>(log(max_err).to_ld()) / std::log(static_cast<double>(norm)) - 0.5;
}

namespace {

const Real& max_of(const Real& a, const Real& b) { return a < b ? b : a; }

bool exact_hit(const Real& e, Bits prec) {
  Real t(1L, prec);
  mpfr_div_2ui(t.get(), t.get(), static_cast<unsigned long>(prec / 2), MPFR_RNDN);
  return e < t;
}

HuntRecord best_for(const PrimeElem& pe, const RealPair& x, const FieldCtx& ctx, int k_window, long& skipped) {
  const QuadInt base = canonical(pe.gen, ctx);
  HuntRecord best;
  bool have = false;
  // |k| ascending so ties keep the generator closest to balanced
  for (int a = 0; a <= k_window; ++a)
    for (int k : {-a, a}) {
      if (a == 0 && k > 0) continue;
      QuadInt g = ctx.mul(base, ctx.unit_pow(k));
      Shift s;
      try {
        s = nearest_shift(g, x, ctx);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ill_conditioned) throw;
        ++skipped;
        continue;
      }
      if (!have || s.max_err() < max_of(best.err1, best.err2)) {
        best.norm = pe.norm.get_si();
        best.gen = g;
        best.k_offset = k;
        best.p = s.p;
        best.err1 = s.err1;
        best.err2 = s.err2;
        have = true;
      }
    }
  require(have, "no well-conditioned generator in the window");
  const Real m = max_of(best.err1, best.err2);
  best.exact = exact_hit(m, ctx.precision_bits);
  best.nu_eff = best.exact ? std::numeric_limits<double>::infinity() : nu_eff_of(m, best.norm);
  return best;
}

}  // namespace

HuntResult scan(const RealPair& x, const FieldCtx& ctx, long norm_max, int k_window, int workers) {
  require(norm_max >= 2 && norm_max <= kHuntNormMax, "hunt norm_max must lie in [2, 1e8]");
  require(k_window >= 0, "k_window must be >= 0");
  workers = std::max(1, workers);
  const std::vector<PrimeElem> primes = enumerate_prime_elements(ctx, norm_max);
  HuntResult out;
  out.degenerate = in_sigma_k(x, ctx);
  out.records.resize(primes.size());
  std::vector<long> skipped(static_cast<std::size_t>(workers), 0);
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(workers));
  auto run = [&](int w) {
    try {
      for (std::size_t i = static_cast<std::size_t>(w); i < primes.size(); i += static_cast<std::size_t>(workers))
        out.records[i] = best_for(primes[i], x, ctx, k_window, skipped[static_cast<std::size_t>(w)]);
    } catch (...) {
      errs[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> ts;
    for (int w = 0; w < workers; ++w) ts.emplace_back(run, w);
    for (auto& t : ts) t.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  for (long s : skipped) out.skipped_ill_conditioned += s;

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : out.records)
    if (r.nu_eff > best) {
      best = r.nu_eff;
      out.running.push_back(r);
    }
  std::vector<double> a;
  a.reserve(out.records.size());
  for (const auto& r : out.records) a.push_back(std::fabs(r.nu_eff));
  if (!a.empty()) {
    std::sort(a.begin(), a.end());
    const std::size_t n = a.size();
    out.median_abs_nu = n % 2 ? a[n / 2] : (a[n / 2 - 1] + a[n / 2]) / 2;
  }
  return out;
}

HuntRecord reevaluate(const HuntRecord& r, const RealPair& x, const FieldCtx& ctx) {
  const Bits p = ctx.precision_bits;
  auto [s1, s2] = ctx.embed(r.gen);
  Real pu(r.p.a, p), pv(r.p.b, p);
  HuntRecord out = r;
  out.err1 = abs(x.x1.with_prec(p) - (pu + pv * ctx.sqrt_d) / s1);
  out.err2 = abs(x.x2.with_prec(p) - (pu - pv * ctx.sqrt_d) / s2);
  const Real m = max_of(out.err1, out.err2);
  out.exact = exact_hit(m, p);
  out.nu_eff = out.exact ? std::numeric_limits<double>::infinity() : nu_eff_of(m, r.norm);
  return out;
}

namespace {

std::string nu_str(const HuntRecord& r) {
  if (r.exact) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", r.nu_eff);
  return buf;
}

}  // namespace

void write_hunt_csv_header(std::ostream& os) { os << "norm,k_offset,p_a,p_b,gen_a,gen_b,err1,err2,nu_eff\n"; }

void write_hunt_csv_row(std::ostream& os, const HuntRecord& r) {
  os << r.norm << ',' << r.k_offset << ',' << r.p.a << ',' << r.p.b << ',' << r.gen.a << ',' << r.gen.b << ','
     << r.err1.str(12) << ',' << r.err2.str(12) << ',' << nu_str(r)
     << '\n';
}

}  // namespace qda
