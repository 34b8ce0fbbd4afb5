#include "qda/approx.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "qda/errors.hpp"
#include "qda/ntheory.hpp"

namespace qda {

const char* to_string(ApproxCase c) { return c == ApproxCase::b_invertible ? "B-invertible" : "A-divisible-by-d"; }

Approximant reduce_approximant(const mpz_class& u, const mpz_class& v, const mpz_class& f, const mpz_class& g,
                               const FieldCtx& ctx, bool check_coprime) {
  const long d = ctx.d;
  QuadInt p(u, v), q(f, g);
  if (q.is_zero()) fail(ErrorKind::invalid_input, "denominator f + g sqrt d is zero");
  if (check_coprime && ctx.norm(euclid_gcd(p, q, ctx)) != 1)
    fail(ErrorKind::not_coprime, "gcd(u + v sqrt d, f + g sqrt d) is not a unit");
  Approximant ap;
  ap.u = u, ap.v = v, ap.f = f, ap.g = g;
  ap.a = u * f - v * g * d;
  ap.b = v * f - u * g;
  ap.W = abs(f * f - g * g * d);
  ap.Z = gcd(f, g);
  mpz_divexact(ap.ap.get_mpz_t(), ap.a.get_mpz_t(), ap.Z.get_mpz_t());
  mpz_divexact(ap.bp.get_mpz_t(), ap.b.get_mpz_t(), ap.Z.get_mpz_t());
  mpz_class Z2 = ap.Z * ap.Z;
  mpz_divexact(ap.Wp.get_mpz_t(), ap.W.get_mpz_t(), Z2.get_mpz_t());
  mpz_class fp = f / ap.Z;

  mpz_class rel = ap.ap * ap.ap - ap.bp * ap.bp * d;
  if (!mpz_divisible_p(rel.get_mpz_t(), ap.Wp.get_mpz_t()))
    fail(ErrorKind::non_conformant, "a'^2 - b'^2 d is not divisible by W'");
  ap.b_coprime = gcd(ap.bp, ap.Wp) == 1;
  ap.a_gcd_d = gcd(ap.ap, ap.Wp) == d;
  // gcd(f' + g' sqrt d, f' - g' sqrt d) is sqrt d exactly when d | f'
  ap.kind = mpz_divisible_ui_p(fp.get_mpz_t(), static_cast<unsigned long>(d)) ? ApproxCase::a_divisible
                                                                                : ApproxCase::b_invertible;
  bool holds = ap.kind == ApproxCase::b_invertible ? ap.b_coprime : ap.a_gcd_d;
  if (!holds) fail(ErrorKind::non_conformant, "case condition fails for the reduced approximant");
  return ap;
}

void write_approximant_csv_header(std::ostream& os) { os << "u,v,f,g,W,Z,a,b,case\n"; }

void write_approximant_csv_row(std::ostream& os, const Approximant& a) {
  os << a.u << ',' << a.v << ',' << a.f << ',' << a.g << ',' << a.W << ',' << a.Z << ',' << a.a << ',' << a.b << ','
     << to_string(a.kind) << '\n';
}

namespace {

bool totally_positive(const QuadInt& x, long d) { return x.a > 0 && x.a * x.a > d * x.b * x.b; }

}  // namespace

std::vector<Convergent> cf_convergents(const std::vector<QuadInt>& partials, const FieldCtx& ctx) {
  require(!partials.empty(), "cf_convergents needs at least one partial");
  for (std::size_t k = 1; k < partials.size(); ++k)
    if (!totally_positive(partials[k], ctx.d))
      fail(ErrorKind::non_positive_partial, "partial a_" + std::to_string(k) + " is not totally positive");
  std::vector<Convergent> out;
  out.push_back({partials[0], QuadInt(1)});
  if (partials.size() > 1)
    out.push_back({ctx.mul(partials[0], partials[1]) + QuadInt(1), partials[1]});
  for (std::size_t k = 2; k < partials.size(); ++k)
    out.push_back({ctx.mul(partials[k], out[k - 1].p) + out[k - 2].p, ctx.mul(partials[k], out[k - 1].q) + out[k - 2].q});
  for (std::size_t k = 1; k < out.size(); ++k) {
    QuadInt det = ctx.mul(out[k].q, out[k - 1].p) - ctx.mul(out[k].p, out[k - 1].q);
    if (!(det == QuadInt(k % 2 ? -1 : 1))) fail(ErrorKind::invalid_input, "determinant identity fails");
  }
  return out;
}

namespace {

struct Searcher {
  long budget, used = 0;
  bool prime(const mpz_class& n) {
    if (++used > budget) fail(ErrorKind::budget_exhausted, "prime search exceeded " + std::to_string(budget) + " candidates");
    return is_prime(n);
  }
};

// Next partial s + t sqrt d from (f_{k-1}, g_{k-1}), (f_{k-2}, g_{k-2}).
QuadInt next_partial(const mpz_class& F1, const mpz_class& G1, const mpz_class& F2, const mpz_class& G2, long d,
                     Searcher& S) {
  mpz_class st = 1;
  while (!(st * F1 + F2 > d * G1 && S.prime(st * F1 + F2))) ++st;
  mpz_class t = 1;
  while (!S.prime(st * F1 + t * G1 * d + F2)) ++t;

  const mpz_class A = st * F1, B = t * G1 * d + F2;
  const mpz_class lhs_gap = st * (F1 - d * G1), rhs = d * (F1 - G1) * t - (F2 - d * G2);
  mpz_class lam = 1;
  // f_k > f_{k-1}^2
  if (F1 * F1 - B >= 0) lam = std::max(lam, mpz_class(fdiv(F1 * F1 - B, A) + 1));
  // the f_k > d g_k inequality, linear in lambda
  if (rhs >= 0) lam = std::max(lam, mpz_class(fdiv(rhs, lhs_gap) + 1));
  // conjugate positivity s^2 > d t^2
  mpz_class smin = isqrt(mpz_class(d * t * t)) + 1;
  lam = std::max(lam, cdiv(smin, st));
  for (;; ++lam) {
    mpz_class s = lam * st;
    if (lam * A + B <= F1 * F1 || lam * lhs_gap <= rhs || s * s <= d * t * t) continue;
    if (S.prime(lam * A + B)) return {s, t};
  }
}

// Continued fraction [a_0: a_1, ..., a_K] under one embedding, evaluated backwards.
Real cf_value(const std::vector<QuadInt>& partials, const FieldCtx& hi, bool second) {
  auto emb = [&](const QuadInt& a) { return second ? hi.sigma2(a) : hi.sigma1(a); };
  Real x = emb(partials.back());
  for (std::size_t j = partials.size() - 1; j-- > 0;) x = emb(partials[j]) + Real(1L, hi.precision_bits) / x;
  return x;
}

}  // namespace

GoodPair construct_good_pair(const FieldCtx& ctx, int steps, long prime_search_budget) {
  require(steps >= 2, "construct_good_pair needs steps >= 2");
  const long d = ctx.d;
  GoodPair gp;
  gp.d = d;
  gp.steps = steps;
  Searcher S{prime_search_budget};

  std::vector<QuadInt> partials = {QuadInt(1), QuadInt(d + 1, 1)};
  std::vector<mpz_class> f = {1, d + 1}, g = {0, 1};
  const Bits prec = ctx.precision_bits;
  mpz_class target = 1;
  target <<= static_cast<unsigned long>(prec + 16);
  auto precise_enough = [&]() {
    std::size_t K = f.size() - 1;
    // sigma_2(q) = f - g sqrt d >= f (1 - 1/sqrt d) > f/3 under f > d g
    mpz_class lo = (f[K] / 3) * (f[K - 1] / 3);
    return lo > target;
  };
  for (int k = 2; k <= steps + 1 || !precise_enough(); ++k) {
    QuadInt a = next_partial(f[k - 1], g[k - 1], f[k - 2], g[k - 2], d, S);
    partials.push_back(a);
    f.push_back(a.a * f[k - 1] + a.b * g[k - 1] * d + f[k - 2]);
    g.push_back(a.b * f[k - 1] + a.a * g[k - 1] + g[k - 2]);
  }
  gp.candidates_tested = S.used;
  gp.partials = partials;
  gp.convergents = cf_convergents(partials, ctx);
  for (std::size_t k = 0; k < f.size(); ++k)
    if (!(gp.convergents[k].q == QuadInt(f[k], g[k]))) fail(ErrorKind::invalid_input, "convergent mismatch");

  FieldCtx hi = ctx.with_precision(prec + 64);
  Real x1 = cf_value(partials, hi, false), x2 = cf_value(partials, hi, true);
  // cross-check against p_K / q_K
  const Convergent& last = gp.convergents.back();
  Real tol(1L, prec);
  mpfr_mul_2si(tol.get(), tol.get(), -static_cast<long>(prec), MPFR_RNDN);
  if (abs(x1 - hi.sigma1(last.p) / hi.sigma1(last.q)) > tol || abs(x2 - hi.sigma2(last.p) / hi.sigma2(last.q)) > tol)
    fail(ErrorKind::precision_exhausted, "continued fraction evaluation disagrees with p_K/q_K");
  gp.x = RealPair(x1.with_prec(prec), x2.with_prec(prec));

  // convergent error bounds at working precision plus two guard digits
  FieldCtx chk = ctx.with_precision(prec + 8);
  auto conv_ok = [&](std::size_t k, bool second) {
    const auto& cp = gp.convergents[k - 1];
    const auto& cq = gp.convergents[k];
    Real x = (second ? gp.x.x2 : gp.x.x1).with_prec(prec + 8);
    Real sp = second ? chk.sigma2(cp.p) : chk.sigma1(cp.p), sq1 = second ? chk.sigma2(cp.q) : chk.sigma1(cp.q);
    Real sq = second ? chk.sigma2(cq.q) : chk.sigma1(cq.q);
    return abs(x - sp / sq1) <= Real(1L, prec + 8) / (sq * sq1);
  };
  for (int k = 2; k <= steps + 1; ++k) {
    const std::size_t K = static_cast<std::size_t>(k);
    StepCheck c{};
    c.k = k;
    c.prime_fk = is_prime(f[K]);
    c.gcd_fk_gk = gcd(f[K], g[K]) == 1 && gcd(f[K - 1], g[K - 1]) == 1;
    c.gcd_fk_fk1 = gcd(f[K], f[K - 1]) == 1;
    c.fk_gt_dgk = f[K] > d * g[K] && d * g[K] > 0 && f[K - 1] > d * g[K - 1] && d * g[K - 1] > 0;
    c.fk_gt_fk1_sq = f[K] > f[K - 1] * f[K - 1];
    const QuadInt& a = partials[K];
    c.cond_gt = a.a * (f[K - 1] - d * g[K - 1]) + (f[K - 2] - d * g[K - 2]) > d * (f[K - 1] - g[K - 1]) * a.b;
    c.conj_positive = totally_positive(a, d);
    QuadInt det = ctx.mul(gp.convergents[K].q, gp.convergents[K - 1].p) - ctx.mul(gp.convergents[K].p, gp.convergents[K - 1].q);
    c.det_identity = det == QuadInt(k % 2 ? -1 : 1);
    c.conv_bound1 = conv_ok(K, false) && conv_ok(K - 1, false);
    c.conv_bound2 = conv_ok(K, true) && conv_ok(K - 1, true);
    gp.checks.push_back(c);
  }
  const bool euclid = d == 3 || d == 7 || d == 11;
  for (int k = 1; k <= steps + 1; ++k) {
    const auto& c = gp.convergents[static_cast<std::size_t>(k)];
    gp.approximants.push_back(reduce_approximant(c.p.a, c.p.b, c.q.a, c.q.b, ctx, euclid));
  }
  return gp;
}

std::string good_pair_json(const GoodPair& gp, int digits) {
  nlohmann::ordered_json j;
  j["d"] = gp.d;
  j["steps"] = gp.steps;
  j["precision_bits"] = gp.x.precision_bits;
  nlohmann::ordered_json parts = nlohmann::ordered_json::array();
  // big integers as decimal strings
  for (const auto& a : gp.partials) parts.push_back({a.a.get_str(), a.b.get_str()});
  j["partials"] = parts;
  j["x1"] = gp.x.x1.fixed(digits);
  j["x2"] = gp.x.x2.fixed(digits);
  return j.dump(2);
}

RealPair target_from_json(const std::string& text, Bits prec) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorKind::invalid_input, std::string("target JSON: ") + e.what());
  }
  if (!j.contains("x1") || !j.contains("x2")) fail(ErrorKind::invalid_input, "target JSON needs x1 and x2");
  auto str = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  return RealPair::parse(str(j["x1"]), str(j["x2"]), prec);
}

namespace {

using i128 = __int128;

int sgn128(i128 x) { return (x > 0) - (x < 0); }

struct FastDomain {
  long d;
  i128 ea, eb, ia, ib;  // eps and eps^-1
  // |sigma_2/sigma_1| in [1/eps, eps) and sigma_1 > 0, decided exactly
  bool canonical(long f, long g) const {
    if (f == 0 && g == 0) return false;
    i128 A = static_cast<i128>(f) * f + static_cast<i128>(d) * g * g, B = 2 * static_cast<i128>(f) * g;
    i128 la = A * ia + d * B * ib, lb = A * ib + B * ia;
    if (sgn128(la) * sgn128(lb) > 0) return false;
    i128 ha = A * ea + d * B * eb, hb = A * eb + B * ea;
    if (sgn128(ha) * sgn128(hb) <= 0) return false;
    int sa = (f > 0) - (f < 0), sb = (g > 0) - (g < 0);
    int s1 = sa * sb >= 0 ? (sa != 0 ? sa : sb)
                          : (static_cast<i128>(f) * f > static_cast<i128>(d) * g * g ? sa : sb);
    return s1 > 0;
  }
};

struct Prefilter {
  long double x1, x2, sd;
  // max over embeddings of err_i |s_i| (|s_1| + |s_2|) for the best 3x3 candidate
  long double c_of(long f, long g) const {
    long double s1 = f + g * sd, s2 = f - g * sd;
    long double y1 = x1 * s1, y2 = x2 * s2;
    long double U = std::round((y1 + y2) / 2), V = std::round((y1 - y2) / (2 * sd));
    long double best = -1, bc = 0;
    for (int du = -1; du <= 1; ++du)
      for (int dv = -1; dv <= 1; ++dv) {
        long double pu = U + du, pv = V + dv;
        long double e1 = std::fabs(x1 - (pu + pv * sd) / s1), e2 = std::fabs(x2 - (pu - pv * sd) / s2);
        long double m = std::max(e1, e2);
        if (best < 0 || m < best) {
          best = m;
          long double t = std::fabs(s1) + std::fabs(s2);
          bc = std::max(e1 * std::fabs(s1) * t, e2 * std::fabs(s2) * t);
        }
      }
    return bc;
  }
};

}  // namespace

DirichletResult dirichlet_search(const RealPair& x, const FieldCtx& ctx, long W_min, long W_max, double c_bound,
                                 int workers) {
  require(W_max > W_min && W_min >= 1, "dirichlet_search needs W_max > W_min >= 1");
  require(W_max <= 1000000000000L, "dirichlet_search: W_max beyond 1e12");
  const long d = ctx.d;
  FastDomain dom{d, ctx.eps.a.get_si(), ctx.eps.b.get_si(), ctx.eps_inv.a.get_si(), ctx.eps_inv.b.get_si()};
  Prefilter pre{x.x1.to_ld(), x.x2.to_ld(), std::sqrt(static_cast<long double>(d))};
  // balanced generators have |sigma_i| <= sqrt(eps W)
  const double lim = std::sqrt(ctx.eps_real.to_double() * static_cast<double>(W_max)) + 1;
  const long F = static_cast<long>(lim), G = static_cast<long>(lim / std::sqrt(static_cast<double>(d))) + 1;

  workers = std::max(1, workers);
  std::vector<std::vector<std::pair<long, long>>> cand(static_cast<std::size_t>(workers));
  auto visit = [&](std::vector<std::pair<long, long>>& out, long f, long g) {
    if (f < -F || f > F || !dom.canonical(f, g)) return;
    if (pre.c_of(f, g) <= c_bound * (1 + 1e-6)) out.emplace_back(f, g);
  };
  // per g, W_min <= |f^2 - d g^2| <= W_max leaves at most two f-intervals per sign
  auto scan = [&](int w) {
    auto& out = cand[static_cast<std::size_t>(w)];
    for (long g = -G + w; g <= G; g += workers) {
      const u64 dg2 = static_cast<u64>(d) * static_cast<u64>(g * g);
      auto ceil_sqrt = [](u64 n) {
        u64 r = isqrt_u64(n);
        return r * r == n ? r : r + 1;
      };
      std::vector<std::pair<u64, u64>> iv;
      iv.emplace_back(ceil_sqrt(dg2 + static_cast<u64>(W_min)), isqrt_u64(dg2 + static_cast<u64>(W_max)));
      if (dg2 >= static_cast<u64>(W_min))
        iv.emplace_back(dg2 >= static_cast<u64>(W_max) ? ceil_sqrt(dg2 - static_cast<u64>(W_max)) : 0,
                        isqrt_u64(dg2 - static_cast<u64>(W_min)));
      for (auto [lo, hi] : iv)
        for (u64 a = lo; a <= hi && a <= static_cast<u64>(F); ++a) {
          visit(out, static_cast<long>(a), g);
          if (a != 0) visit(out, -static_cast<long>(a), g);
        }
    }
  };
  if (workers == 1) {
    scan(0);
  } else {
    std::vector<std::thread> ts;
    for (int w = 0; w < workers; ++w) ts.emplace_back(scan, w);
    for (auto& t : ts) t.join();
  }
  std::vector<std::pair<long, long>> all;
  for (auto& c : cand) all.insert(all.end(), c.begin(), c.end());
  auto key = [d](const std::pair<long, long>& q) {
    return std::make_tuple(std::labs(q.first * q.first - d * q.second * q.second), std::labs(q.first), q.first, q.second);
  };
  std::sort(all.begin(), all.end(), [&](const auto& l, const auto& r) { return key(l) < key(r); });

  DirichletResult res;
  for (auto [f, g] : all) {
    QuadInt q(f, g);
    Shift s = nearest_shift(q, x, ctx);
    auto [s1, s2] = ctx.embed(q);
    Real t = abs(s1) + abs(s2);
    double c1 = (s.err1 * abs(s1) * t).to_double(), c2 = (s.err2 * abs(s2) * t).to_double();
    if (std::max(c1, c2) > c_bound) continue;
    if (ctx.norm(euclid_gcd(s.p, q, ctx)) != 1) continue;
    res.hits.push_back({reduce_approximant(s.p.a, s.p.b, q.a, q.b, ctx, false), s.err1, s.err2, c1, c2});
    res.c_search = std::max(res.c_search, std::max(c1, c2));
  }
  return res;
}

std::vector<EtaRow> eta_goodness_scan(const RealPair& x, const FieldCtx& ctx, long W_max, int workers) {
  require(W_max >= 2, "eta_goodness_scan needs W_max >= 2");
  DirichletResult r = dirichlet_search(x, ctx, 1, W_max, kDefaultCSearch, workers);
  std::vector<EtaRow> rows;
  for (const auto& h : r.hits) {
    double ratio = (h.ap.Z == 1 || h.ap.W <= 1) ? 0.0 : std::log(h.ap.Z.get_d()) / std::log(h.ap.W.get_d());
    rows.push_back({h.ap.W, h.ap.Z, ratio, ratio});
  }
  for (std::size_t i = rows.size(); i-- > 1;) rows[i - 1].tail_inf = std::min(rows[i - 1].tail_inf, rows[i].tail_inf);
  return rows;
}

}  // namespace qda
