// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures. Tolerances and limits are pinned here.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "qda/approx.hpp"
#include "qda/congsums.hpp"
#include "qda/errors.hpp"
#include "qda/fitting.hpp"
#include "qda/hunt.hpp"
#include "qda/qforms.hpp"
#include "qda/quadfield.hpp"
#include "qda/sieve.hpp"
#include "qda/weights.hpp"

using namespace qda;
namespace fs = std::filesystem;

namespace {

constexpr double kUnitSeconds = 1;
constexpr double kPoissonSeconds = 120;
constexpr double kPoissonTol = 1e-12;
constexpr double kRootSeconds = 300;
constexpr double kHuntSeconds = 600;
constexpr double kHuntMedian = 0.1;
constexpr double kHuntPrecisionTol = 1e-6;
constexpr double kTypeSplitTol = 1e-12;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

i64 md(i64 x, i64 m) { return ((x % m) + m) % m; }

// ---- 1
Outcome units() {
  auto t0 = std::chrono::steady_clock::now();
  const std::map<long, QuadInt> want{{3, {2, 1}}, {7, {8, 3}}, {11, {10, 3}}};
  bool ok = true;
  for (const auto& [d, e] : want) ok = ok && fundamental_unit(d) == e && fundamental_unit_bruteforce(d) == e;
  double t = seconds_since(t0);
  return {ok && t < kUnitSeconds, "2+√3, 8+3√7, 10+3√11 vs Pell scan, " + fmt("%.3f s", t)};
}

// ---- 2
Outcome poisson() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  long n = 0, bad = 0;
  for (const auto& c : weights_corpus(10, 2024)) {
    WeightParams P = params_for(c);
    double a = F_direct(c.q, P).value, b = F_poisson(c.q, P).value;
    double e = std::fabs(a - b) / std::max(1.0, a);
    worst = std::max(worst, e);
    if (e > kPoissonTol) ++bad;
    ++n;
  }
  double t = seconds_since(t0);
  return {n >= 100 && bad == 0 && t < kPoissonSeconds,
          std::to_string(n) + " samples, worst scaled diff " + fmt("%.2e", worst) + ", " + fmt("%.1f s", t)};
}

// ---- 3
Outcome balance_bounds() {
  std::mt19937_64 rng(31);
  long violations = 0, checked = 0;
  for (long d : {3L, 7L, 11L}) {
    FieldCtx ctx = FieldCtx::make(d);
    long lim = static_cast<long>(std::sqrt(1e8 / (2.0 * d)));
    std::uniform_int_distribution<long> coord(-lim, lim), kd(-20, 20);
    for (int i = 0; i < 1000;) {
      QuadInt m(coord(rng), coord(rng));
      if (m.is_zero() || norm(m, d) > 100000000) continue;
      Balanced b = balance_unit(mul(m, ctx.unit_pow(kd(rng)), d), ctx);
      Real rn = sqrt_of(norm(m, d), 256);
      auto [s1, s2] = ctx.embed(b.m_bal);
      for (const Real* s : {&s1, &s2})
        if (abs(*s) < rn / ctx.eps_real || abs(*s) > rn * ctx.eps_real) ++violations;
      if (!associates(b.m_bal, m, d)) ++violations;
      ++checked;
      ++i;
    }
  }
  return {violations == 0, std::to_string(checked) + " elements of norm <= 1e8, " + std::to_string(violations) +
                               " violations"};
}

// ---- 4
Outcome root_contract() {
  auto t0 = std::chrono::steady_clock::now();
  long total = 0, violations = 0;
  for (long d : {3L, 7L, 11L}) {
    RootConstants c = root_constants(d);
    for (long Q = 2; Q <= 10000; ++Q)
      for (u64 w : sqrt_mod(d, static_cast<u64>(Q))) {
        RootApprox ra = approx_root(Q, mpz_class(static_cast<unsigned long>(w)), d);
        ++total;
        if (gcd(ra.u, ra.r) != 1 || !satisfies_contract(ra, c)) ++violations;
        mpq_class lhs(ra.omega, ra.Q), approx(ra.u, ra.r);
        lhs.canonicalize();
        approx.canonicalize();
        if (lhs != approx + ra.residual || ra.err != abs(ra.residual)) ++violations;
      }
  }
  double t = seconds_since(t0);
  return {violations == 0 && total > 0 && t < kRootSeconds,
          std::to_string(total) + " roots, " + std::to_string(violations) + " violations, " + fmt("%.1f s", t)};
}

// ---- 5
i64 theta_brute(i64 X, i64 a, i64 b, i64 W) {
  i64 n = 0;
  for (i64 A = -X; A <= X; ++A)
    for (i64 B = -X; B <= X; ++B)
      if (md(b * B - a * A, W) == 0) ++n;
  return n;
}

i64 system_brute(i64 U, i64 V, i64 a, i64 b, i64 W, long d) {
  std::map<i64, i64> hist;
  for (i64 x = -V; x <= V; ++x) ++hist[md(x, W)];
  auto h = [&](i64 r) {
    auto it = hist.find(r);
    return it == hist.end() ? i64{0} : it->second;
  };
  i64 n = 0;
  for (i64 l = -U; l <= U; ++l)
    for (i64 m = -U; m <= U; ++m) n += h(md(a * l + b * d * m, W)) * h(md(b * l + a * m, W));
  return n;
}

Outcome counting() {
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<i64> xd(0, 50), cd(-400, 400), wd(1, 500);
  long mism = 0, over = 0, conformant = 0;
  for (int i = 0; i < 500; ++i) {
    long d = i % 3 == 0 ? 3 : (i % 3 == 1 ? 7 : 11);
    i64 X = xd(rng), a = cd(rng), b = cd(rng), W = wd(rng);
    if (theta_count({X, a, b, W}) != theta_brute(X, a, b, W)) ++mism;
    i64 U = xd(rng), V = xd(rng);
    if (system_count(U, V, a, b, W, d) != system_brute(U, V, a, b, W, d)) ++mism;
  }
  for (long d : {3L, 7L, 11L})
    for (const auto& q : conformant_corpus(d, 50, 10000, 0, 77)) {
      std::uniform_int_distribution<i64> uv(0, 50);
      i64 U = uv(rng), V = uv(rng);
      ++conformant;
      if (system_count(U, V, q.a, q.b, q.W, d) > theta_count({2 * U, q.a, q.b, q.W}) * theta_count({V, q.a, q.b, q.W}))
        ++over;
    }
  return {mism == 0 && over == 0, "500 theta + 500 system queries vs brute force: " + std::to_string(mism) +
                                      " mismatches; theta-product bound broken on " + std::to_string(over) + "/" +
                                      std::to_string(conformant)};
}

// ---- 6
Outcome kernel() {
  double worst = 0;
  long n = 0, pipeline = 0;
  for (const auto& in : kernel_corpus(100, kKernelSeed)) {
    KernelBound kb = kernel_bound_check_rational(in.H, in.X, in.gamma, in.u, in.r);
    worst = std::max(worst, kb.ratio);
    ++n;
    if (in.gamma.get_den() > 1000) ++pipeline;
  }
  // gamma = omega/Q straight from approx_root
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<long> qd(1000, 100000);
  long extra = 0;
  while (extra < 20) {
    long Q = qd(rng);
    auto roots = sqrt_mod(3, static_cast<u64>(Q));
    if (roots.empty()) continue;
    RootApprox ra = approx_root(Q, mpz_class(static_cast<unsigned long>(roots[0])), 3);
    mpq_class g(ra.omega, ra.Q);
    g.canonicalize();
    worst = std::max(worst, kernel_bound_check_rational(std::sqrt(double(Q)), 50, g, ra.u, ra.r).ratio);
    ++extra;
  }
  return {worst <= 1 && n >= 100, std::to_string(n) + " corpus inputs (" + std::to_string(pipeline) +
                                      " with den > 1e3) + 20 approx_root gammas, worst ratio " + fmt("%.4f", worst)};
}

// ---- 7
Outcome sieve() {
  FieldCtx ctx = FieldCtx::make(3, 128);
  IdealTable T = IdealTable::build(ctx, 1000);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> idx(0, static_cast<int>(T.ideals.size()) - 1), val(-20, 20);
  std::uniform_real_distribution<double> zd(1.5, 40), xd(20, 1000), mud(0.2, 0.8), kd(0.2, 0.5);
  long mob_bad = 0, b_bad = 0;
  for (int c = 0; c < 100; ++c) {
    IdealWeight w;
    for (int i = 0; i < 1 + c % 40; ++i) w[idx(rng)] = val(rng);
    double z = zd(rng);
    if (s_of_w(T, w, z) != s_via_mobius(T, w, z)) ++mob_bad;
  }
  for (int c = 0; c < 100; ++c) {
    SieveParams p;
    p.x = xd(rng);
    p.mu = mud(rng);
    p.kappa = kd(rng);
    p.M = (std::pow(p.x, p.mu) + p.x) / 2;
    IdealWeight g;
    while (g.size() < 30) {
      int i = idx(rng);
      if (static_cast<double>(T.ideals[static_cast<std::size_t>(i)].norm) > std::pow(p.x, p.mu)) g[i] = val(rng);
    }
    BuchstabReport r = buchstab_check(T, g, p, default_order(T, p.z()));
    BuchstabReport r2 = buchstab_check(T, g, p, reversed_tie_order(T, p.z()));
    if (!r.match() || !r.q_t_empty || r2.buchstab != r.buchstab) ++b_bad;
  }
  WeightParams P;
  P.N = 100;
  P.delta = 0.5;
  P.ctx = ctx;
  P.target = RealPair(Real(0.25, 128), Real(0.6, 128));
  IdealTable big = IdealTable::build(ctx, std::max(1000L, default_norm_max(P)));
  auto [om, omt] = omega_weights(big, P);
  double worst = 0;
  for (double M : {20.0, 50.0, 200.0}) worst = std::max(worst, type_split(big, om, omt, {1000, 0.4, 0.45, M}).rel_err());
  return {mob_bad == 0 && b_bad == 0 && worst <= kTypeSplitTol,
          "Mobius " + std::to_string(100 - mob_bad) + "/100, Buchstab " + std::to_string(100 - b_bad) +
              "/100 (two orders), type split rel err " + fmt("%.1e", worst)};
}

// ---- 8
Outcome good_pair() {
  FieldCtx ctx = FieldCtx::make(3, 192);
  GoodPair gp;
  try {
    gp = construct_good_pair(ctx, 3);
  } catch (const Error& e) {
    return {false, e.what()};
  }
  bool checks = gp.checks.size() == 3, coprime = true, bounds = true;
  for (const auto& c : gp.checks) {
    checks = checks && c.ok();
    bounds = bounds && c.conv_bound1 && c.conv_bound2;
  }
  long zero_ratio = 0;
  for (const auto& a : gp.approximants) {
    coprime = coprime && gcd(a.f, a.g) == 1;
    zero_ratio += a.Z == 1;
  }
  bool eta = zero_ratio == static_cast<long>(gp.approximants.size());
  return {checks && coprime && bounds && eta,
          "steps 3, " + std::to_string(gp.candidates_tested) + " prime candidates, conditions " +
              (checks ? "ok" : "FAILED") + ", error bounds " + (bounds ? "ok" : "FAILED") + ", gcd(f,g)=1 " +
              (coprime ? "ok" : "FAILED") + ", eta ratios 0 on " + std::to_string(zero_ratio) + "/" +
              std::to_string(gp.approximants.size())};
}

// ---- 9
Outcome hunt() {
  auto t0 = std::chrono::steady_clock::now();
  RealPair x = construct_good_pair(FieldCtx::make(3, 192), 3).x;
  HuntResult r = scan(x, FieldCtx::make(3, 192), 100000, 3, 1);
  double t = seconds_since(t0);
  RealPair x2 = construct_good_pair(FieldCtx::make(3, 384), 3).x;
  HuntResult r2 = scan(x2, FieldCtx::make(3, 384), 100000, 3, 4);
  double best = -1e300, drift = 0;
  bool aligned = r.records.size() == r2.records.size();
  for (std::size_t i = 0; aligned && i < r.records.size(); ++i) {
    best = std::max(best, r.records[i].nu_eff);
    aligned = r.records[i].norm == r2.records[i].norm;
    drift = std::max(drift, std::fabs(r.records[i].nu_eff - r2.records[i].nu_eff));
  }
  return {aligned && t < kHuntSeconds && best > 0 && r.median_abs_nu <= kHuntMedian && drift <= kHuntPrecisionTol,
          std::to_string(r.records.size()) + " prime ideals in " + fmt("%.1f s", t) + ", best nu_eff " +
              fmt("%.4f", best) + ", median |nu_eff| " + fmt("%.4f", r.median_abs_nu) + ", 384-bit drift " +
              fmt("%.1e", drift)};
}

// ---- 10
std::string capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p) return "<popen failed>";
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  if (pclose(p) != 0) out += "<nonzero exit>";
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path dir = fs::path(QDA_SOURCE_DIR) / "tests" / "golden";
  std::ifstream cases(dir / "cases.txt");
  if (!cases) return {false, "missing tests/golden/cases.txt"};
  long runs = 0, bad = 0;
  std::string first_bad;
  for (std::string line; std::getline(cases, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto bar = line.find('|');
    std::istringstream ns(line.substr(0, bar));
    std::string name;
    ns >> name;
    const std::string args = line.substr(bar + 1), want = slurp(dir / (name + ".out"));
    for (const char* w : {"1", "1", "4", "4"}) {
      ++runs;
      if (capture(std::string(QDA_CLI) + " --workers " + w + " " + args) != want) {
        ++bad;
        if (first_bad.empty()) first_bad = name;
      }
    }
  }
  // the hunt side file
  fs::path tmp = fs::temp_directory_path() / "qda_acceptance";
  fs::create_directories(tmp);
  std::string ref;
  for (const char* w : {"1", "1", "4", "4"}) {
    ++runs;
    capture(std::string(QDA_CLI) + " --workers " + w + " --out " + (tmp / "h.csv").string() + " hunt --norm-max 5000");
    std::string got = slurp(tmp / "h.csv") + slurp(tmp / "h.running.csv");
    if (ref.empty()) ref = got;
    if (got != ref || got.empty()) {
      ++bad;
      if (first_bad.empty()) first_bad = "hunt --out";
    }
  }
  return {bad == 0 && runs > 40, std::to_string(runs) + " runs (2x workers 1, 2x workers 4 per golden case), " +
                                     std::to_string(bad) + " differing" + (bad ? ", first " + first_bad : "")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"fundamental units", units},
      {"Poisson identity", poisson},
      {"balanced conjugate bounds", balance_bounds},
      {"root approximation contract", root_contract},
      {"counting oracles", counting},
      {"kernel sum bound", kernel},
      {"sieve identities", sieve},
      {"good-pair construction", good_pair},
      {"hunt sanity", hunt},
      {"CLI determinism", determinism},
  };
  int failures = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << k << ". " << name << ": " << o.detail << std::endl;
  }
  return failures;
}
