#include "qda/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>

#include "qda/constants.hpp"
#include "qda/errors.hpp"

namespace qda {

using f128 = __float128;

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

f128 sqrt_d128(long d) { return sqrt_of(d, 128).to_f128(); }

std::pair<f128, f128> embed128(const QuadInt& q, long d, f128 sd) { return embed_as<f128>(q, sd, d, &to_f128); }

// (u, v) with u + v sqrt d in [lo1, hi1] and u - v sqrt d in [lo2, hi2]
template <class Fn>
void for_each_in_box(long double lo1, long double hi1, long double lo2, long double hi2, long double sd, Fn&& fn) {
  auto pad = [](long double x, long double s) { return x + s * 1e-12L * (1 + std::fabs(x)); };
  lo1 = pad(lo1, -1), lo2 = pad(lo2, -1), hi1 = pad(hi1, 1), hi2 = pad(hi2, 1);
  long vlo = static_cast<long>(std::ceil((lo1 - hi2) / (2 * sd))), vhi = static_cast<long>(std::floor((hi1 - lo2) / (2 * sd)));
  for (long v = vlo; v <= vhi; ++v) {
    long double vs = v * sd;
    long ulo = static_cast<long>(std::ceil(std::max(lo1 - vs, lo2 + vs)));
    long uhi = static_cast<long>(std::floor(std::min(hi1 - vs, hi2 + vs)));
    for (long u = ulo; u <= uhi; ++u) fn(u, v);
  }
}

long double gauss_radius(double tol) { return std::sqrt(std::log(1.0L / tol) / kPi) + 0.5L; }

}  // namespace

void WeightParams::validate() const {
  require(N >= 2, "N must be >= 2");
  require(delta * static_cast<double>(N) >= 1.0 && delta <= 1.0, "delta must lie in [1/N, 1]");
  require(C_exp >= 1, "C_exp must be >= 1");
}

long double smooth_f(long double x, int C_exp) {
  long double t = kPi * x * x;
  long double base = std::exp(-t) * -std::expm1(-t);
  if (!(base > 0)) return 0;
  return std::pow(base, C_exp);
}

double smooth_f(double x, int C_exp) { return static_cast<double>(smooth_f(static_cast<long double>(x), C_exp)); }

double smooth_f_K(int C_exp) { return std::pow(std::numbers::pi, C_exp); }

PsiValue psi(const QuadInt& q, const WeightParams& P) {
  if (q.is_zero()) fail(ErrorKind::invalid_input, "psi of zero");
  P.validate();
  const FieldCtx& ctx = P.ctx;
  QuadInt m = balance_unit(q, ctx).m_bal;
  auto [s1, s2] = embed_as<long double>(m, static_cast<long double>(sqrt_d128(ctx.d)), ctx.d, &to_ld);
  const long double rootN = std::sqrt(static_cast<long double>(P.N));
  const long double eps = ctx.eps_real.to_ld();
  const long double a0 = std::fabs(s1) / rootN, b0 = std::fabs(s2) / rootN;
  const long double tol = P.ctx.trunc_tol;
  PsiValue out;
  long double sum = smooth_f(a0, P.C_exp) * smooth_f(b0, P.C_exp);
  for (int side : {1, -1}) {
    long double a = a0, b = b0;
    int small = 0;
    for (int n = 1; n < 100000 && small < 10; ++n) {
      if (side > 0) a *= eps, b /= eps;
      else a /= eps, b *= eps;
      long double t = smooth_f(a, P.C_exp) * smooth_f(b, P.C_exp);
      sum += t;
      ++out.terms;
      small = t < tol ? small + 1 : 0;
    }
  }
  const long double r = std::pow(eps, -2.0L * P.C_exp);
  out.tail = static_cast<double>(4 * tol * r / (1 - r));
  out.psi = 2 * sum;  // +-m
  out.psi_tilde = static_cast<long double>(P.N) / static_cast<long double>(ctx.norm(q).get_d()) * out.psi;
  return out;
}

Series F_direct(const QuadInt& q, const WeightParams& P) {
  if (q.is_zero()) fail(ErrorKind::invalid_input, "F_direct of zero");
  P.validate();
  const long d = P.ctx.d;
  const f128 sd = sqrt_d128(d);
  auto [s1, s2] = embed128(q, d, sd);
  const f128 x1 = P.target.x1.to_f128(), x2 = P.target.x2.to_f128();
  const long double Delta = P.delta / std::sqrt(static_cast<long double>(P.N));
  const long double R = gauss_radius(P.ctx.trunc_tol) * Delta;
  const f128 X1 = x1 * s1, X2 = x2 * s2;
  auto range = [&](f128 X, f128 s) {
    long double a = static_cast<long double>(X - R * s), b = static_cast<long double>(X + R * s);
    return std::pair{std::min(a, b), std::max(a, b)};
  };
  auto [lo1, hi1] = range(X1, s1);
  auto [lo2, hi2] = range(X2, s2);
  f128 acc = 0;
  long count = 0;
  const long double inv = 1.0L / (Delta * Delta);
  for_each_in_box(lo1, hi1, lo2, hi2, static_cast<long double>(sd), [&](long u, long v) {
    f128 e1 = (X1 - (u + v * sd)) / s1, e2 = (X2 - (u - v * sd)) / s2;
    long double r2 = static_cast<long double>(e1 * e1 + e2 * e2);
    acc += std::exp(-kPi * r2 * inv);
    ++count;
  });
  Series out;
  out.value = static_cast<double>(acc);
  // points outside the box each carry at most exp(-pi R^2 / Delta^2)
  out.tail = 4 * std::exp(-static_cast<double>(kPi * R * R * inv)) * static_cast<double>(count + 1);
  return out;
}

PoissonValue F_poisson(const QuadInt& q, const WeightParams& P) {
  if (q.is_zero()) fail(ErrorKind::invalid_input, "F_poisson of zero");
  P.validate();
  const long d = P.ctx.d;
  const f128 sd = sqrt_d128(d);
  auto [s1, s2] = embed128(q, d, sd);
  const f128 x1 = P.target.x1.to_f128(), x2 = P.target.x2.to_f128();
  const long double scale = kPi * P.delta * P.delta / (4.0L * d * P.N);
  const long double Rp = std::sqrt(std::log(1.0L / P.ctx.trunc_tol) / scale);
  const long double b1 = Rp / std::fabs(static_cast<long double>(s1)), b2 = Rp / std::fabs(static_cast<long double>(s2));
  const long fq = q.a.get_si(), gq = q.b.get_si();
  const f128 ca = (x2 - x1) / (2 * sd), cb = -(x1 + x2) / 2;
  f128 re = 0, im = 0;
  PoissonValue out;
  for_each_in_box(-b1, b1, -b2, b2, static_cast<long double>(sd), [&](long u, long v) {
    // r = p q
    const long ra = u * fq + d * v * gq, rb = u * gq + v * fq;
    const f128 r1 = ra + rb * sd, r2 = ra - rb * sd;
    long double w = std::exp(-scale * static_cast<long double>(r1 * r1 + r2 * r2));
    // (sigma_2(r) x2 - sigma_1(r) x1) / (2 sqrt d)
    f128 ph = ra * ca + rb * cb;
    ph -= static_cast<f128>(static_cast<long long>(ph));
    long double ang = 2 * kPi * static_cast<long double>(ph);
    re += w * std::cos(ang);
    im += w * std::sin(ang);
    ++out.terms;
  });
  const long double W = static_cast<long double>(P.ctx.norm(q).get_d());
  const long double z = W / P.N * P.delta * P.delta / (2 * std::sqrt(static_cast<long double>(d)));
  out.zero_term = static_cast<double>(z);
  out.value = static_cast<double>(z * static_cast<long double>(re));
  out.nonzero = static_cast<double>(z * static_cast<long double>(re - 1));
  out.imag = static_cast<double>(z * static_cast<long double>(im));
  out.tail = static_cast<double>(z) * P.ctx.trunc_tol * static_cast<double>(out.terms + 1);
  if (std::fabs(out.imag) > 1e-12 * std::max(1.0, std::fabs(out.value)))
    fail(ErrorKind::precision_exhausted, "F_poisson imaginary residue too large");
  return out;
}

double WeightSample::poisson_rel_err() const { return std::fabs(F_direct - F_poisson) / std::max(1.0, F_direct); }

WeightSample weight_sample(const QuadInt& q, const WeightParams& P) {
  WeightSample s;
  s.gen = q;
  s.ideal_norm = P.ctx.norm(q).get_si();
  PsiValue ps = psi(q, P);
  s.psi = static_cast<double>(ps.psi);
  s.psi_tilde = static_cast<double>(ps.psi_tilde);
  s.F_direct = F_direct(q, P).value;
  PoissonValue pv = F_poisson(q, P);
  s.F_poisson = pv.value;
  const double pref = P.delta * P.delta / (2 * std::sqrt(static_cast<double>(P.ctx.d)));
  s.omega = pref * s.psi;
  s.omega_tilde = s.psi_tilde * s.F_direct;
  s.diff_def = s.omega_tilde - s.omega;
  s.diff_poisson = s.psi_tilde * pv.nonzero;
  return s;
}

void write_weight_csv_header(std::ostream& os) {
  os << "ideal_norm,gen_a,gen_b,psi,psi_tilde,F_direct,F_poisson,omega,omega_tilde\n";
}

void write_weight_csv_row(std::ostream& os, const WeightSample& s) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%ld,%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.ideal_norm,
                s.gen.a.get_str().c_str(), s.gen.b.get_str().c_str(), s.psi, s.psi_tilde, s.F_direct, s.F_poisson,
                s.omega, s.omega_tilde);
  os << buf;
}

double envelope_tail(const WeightParams& P, long norm_max) {
  // omega_tilde <= 2 K C_F exp(-(pi/2) D C n/N) log N for n >= N, at most two prime ideals per norm
  const double a = std::numbers::pi / 2 * kEnvelopeD * P.C_exp / static_cast<double>(P.N);
  const double K = 2 * kPsiEnvelopeK * kFSizeC;
  return 2 * K * std::log(static_cast<double>(P.N)) * std::exp(-a * static_cast<double>(norm_max + 1)) / -std::expm1(-a);
}

long default_norm_max(const WeightParams& P) {
  const double a = std::numbers::pi / 2 * kEnvelopeD * P.C_exp / static_cast<double>(P.N);
  const double K = 2 * kPsiEnvelopeK * kFSizeC;
  double m = std::log(2 * K * std::log(static_cast<double>(P.N)) / (-std::expm1(-a) * 1e-9)) / a;
  long M = std::max(P.N, static_cast<long>(std::ceil(m)));
  while (envelope_tail(P, M) >= 1e-9) ++M;
  return M;
}

PrimeSums prime_sums(const WeightParams& P, long norm_max, int workers) {
  P.validate();
  PrimeSums out;
  out.norm_max = norm_max;
  out.envelope_tail = envelope_tail(P, norm_max);
  if (out.envelope_tail >= 1e-9)
    fail(ErrorKind::truncation_insufficient,
         "norm_max " + std::to_string(norm_max) + " leaves envelope tail " + std::to_string(out.envelope_tail));
  auto primes = enumerate_prime_elements(P.ctx, norm_max);
  std::vector<double> om(primes.size()), omt(primes.size());
  workers = std::max(1, workers);
  auto run = [&](int w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < primes.size(); i += static_cast<std::size_t>(workers)) {
      PsiValue ps = psi(primes[i].gen, P);
      om[i] = static_cast<double>(ps.psi) * P.delta * P.delta / (2 * std::sqrt(static_cast<double>(P.ctx.d)));
      omt[i] = static_cast<double>(ps.psi_tilde) * F_direct(primes[i].gen, P).value;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> ts;
    for (int w = 0; w < workers; ++w) ts.emplace_back(run, w);
    for (auto& t : ts) t.join();
  }
  // fixed summation order
  for (std::size_t i = 0; i < primes.size(); ++i) out.T += om[i], out.T_tilde += omt[i];
  out.ideals = static_cast<long>(primes.size());
  const double n = static_cast<double>(P.N);
  out.ratio = out.T / (P.delta * P.delta * n / std::log(n));
  return out;
}

QuadInt random_generator(std::mt19937_64& rng, const FieldCtx& ctx, long norm_max) {
  require(norm_max >= 1, "random_generator needs norm_max >= 1");
  const double lim = std::sqrt(ctx.eps_real.to_double() * static_cast<double>(norm_max)) + 1;
  const long F = static_cast<long>(lim), G = static_cast<long>(lim / std::sqrt(static_cast<double>(ctx.d))) + 1;
  std::uniform_int_distribution<long> uf(-F, F), ug(-G, G);
  for (;;) {
    QuadInt q(uf(rng), ug(rng));
    if (q.is_zero()) continue;
    mpz_class W = ctx.norm(q);
    if (W > norm_max) continue;
    return canonical(q, ctx);
  }
}

std::vector<WeightCase> weights_corpus(int per_config, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<WeightCase> out;
  for (long d : {3L, 7L, 11L}) {
    FieldCtx ctx = FieldCtx::make(d, 64);
    for (long N : {100L, 1000L})
      for (double delta : {0.25, 1.0})
        for (int i = 0; i < per_config; ++i) {
          QuadInt q = random_generator(rng, ctx, 10000);
          double x1 = U(rng), x2 = U(rng);
          out.push_back({d, N, delta, q, x1, x2});
        }
  }
  return out;
}

WeightParams params_for(const WeightCase& c, Bits prec) {
  WeightParams P;
  P.N = c.N;
  P.delta = c.delta;
  P.ctx = FieldCtx::make(c.d, prec);
  P.target = RealPair(Real(c.x1, prec), Real(c.x2, prec));
  return P;
}

std::vector<QuadInt> canonical_generators(const FieldCtx& ctx, long lo, long hi) {
  require(1 <= lo && lo <= hi, "canonical_generators needs 1 <= lo <= hi");
  const long d = ctx.d;
  const double lim = std::sqrt(ctx.eps_real.to_double() * static_cast<double>(hi)) + 1;
  const long F = static_cast<long>(lim), G = static_cast<long>(lim / std::sqrt(static_cast<double>(d))) + 1;
  std::vector<QuadInt> out;
  for (long f = -F; f <= F; ++f)
    for (long g = -G; g <= G; ++g) {
      long W = std::labs(f * f - d * g * g);
      if (W < lo || W > hi) continue;
      QuadInt q(f, g);
      if (canonical(q, ctx) == q) out.push_back(q);
    }
  std::sort(out.begin(), out.end(), [&](const QuadInt& a, const QuadInt& b) {
    auto ka = std::make_tuple(ctx.norm(a), a.a, a.b), kb = std::make_tuple(ctx.norm(b), b.a, b.b);
    return ka < kb;
  });
  return out;
}

}  // namespace qda
