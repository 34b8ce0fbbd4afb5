#include "qda/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "qda/congsums.hpp"
#include "qda/constants.hpp"
#include "qda/qforms.hpp"
#include "qda/weights.hpp"

namespace qda {

std::string CorpusHash::hex() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

nlohmann::ordered_json fit_root_constants() {
  nlohmann::ordered_json out;
  out["corpus"] = "every root omega of x^2 = d mod Q, 2 <= Q <= 10000, d in {3,7,11}";
  CorpusHash hash;
  for (long d : {3L, 7L, 11L}) {
    double lo = 1e300, hi = 0, c3 = 0;
    long count = 0;
    for (long Q = 2; Q <= 10000; ++Q)
      for (u64 w : sqrt_mod(d, static_cast<u64>(Q))) {
        RootApprox ra = approx_root(Q, mpz_class(static_cast<unsigned long>(w)), d);
        hash.add(std::to_string(d) + ":" + std::to_string(Q) + ":" + std::to_string(w));
        double x = ra.r.get_d() / std::sqrt(static_cast<double>(Q));
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        c3 = std::max(c3, mpq_class(ra.err * ra.r * ra.r).get_d());
        ++count;
      }
    auto an = analytic_root_constants(d);
    out[std::to_string(d)] = {{"count", count},
                              {"observed", {lo, hi, c3}},
                              {"c1", lo / kFitSafety},
                              {"c2", hi * kFitSafety},
                              {"c3", c3 * kFitSafety},
                              {"analytic", {an.c1, an.c2, an.c3}}};
  }
  out["corpus_hash"] = hash.hex();
  return out;
}

nlohmann::ordered_json fit_theta() {
  nlohmann::ordered_json out;
  out["corpus"] = "conformant_corpus(d, 400, W_max=10000, X_max=200, seed=1000+d), d in {3,7,11}";
  CorpusHash hash;
  double worst = 0;
  for (long d : {3L, 7L, 11L})
    for (const auto& q : conformant_corpus(d, 400, 10000, 200, kThetaSeed + static_cast<std::uint64_t>(d))) {
      hash.add(std::to_string(d) + ":" + std::to_string(q.X) + ":" + std::to_string(q.a) + ":" + std::to_string(q.b) +
               ":" + std::to_string(q.W));
      ThetaBound tb = theta_bound_check(q, d);
      worst = std::max(worst, tb.ratio * kThetaC);  // ratio at C = 1
    }
  out["observed_max"] = worst;
  out["C"] = worst * kFitSafety;
  out["corpus_hash"] = hash.hex();
  return out;
}

nlohmann::ordered_json fit_kernel() {
  nlohmann::ordered_json out;
  out["corpus"] = "kernel_corpus(600, seed=1)";
  CorpusHash hash;
  double worst = 0;
  for (const auto& in : kernel_corpus(600, kKernelSeed)) {
    hash.add(in.gamma.get_str() + ":" + in.u.get_str() + ":" + in.r.get_str() + ":" + std::to_string(in.H) + ":" +
             std::to_string(in.X));
    KernelBound kb = kernel_bound_check_rational(in.H, in.X, in.gamma, in.u, in.r);
    worst = std::max(worst, kb.ratio * kKernelC);
  }
  out["observed_max"] = worst;
  out["C"] = worst * kFitSafety;
  out["corpus_hash"] = hash.hex();
  return out;
}

}  // namespace

nlohmann::ordered_json fit_weights() {
  nlohmann::ordered_json out;
  out["corpus"] =
      "C = 4, D = 2; d in {3,7,11}, N in {100,1000}: floor over all canonical q with N <= norm <= 2N; envelope over "
      "all canonical q with norm <= 4N plus 200 random with norm <= 50N (seed 77); F size over weights_corpus(100, 5)";
  CorpusHash hash;
  long double floor_min = 1e300L, env_max = 0;
  std::mt19937_64 rng(77);
  for (long d : {3L, 7L, 11L})
    for (long N : {100L, 1000L}) {
      WeightParams P;
      P.N = N;
      P.ctx = FieldCtx::make(d, 128);
      for (const auto& q : canonical_generators(P.ctx, N, 2 * N)) {
        hash.add("floor:" + std::to_string(d) + ":" + std::to_string(N) + ":" + to_string(q, d));
        PsiValue v = psi(q, P);
        floor_min = std::min({floor_min, v.psi, v.psi_tilde});
      }
      std::vector<QuadInt> env = canonical_generators(P.ctx, 1, 4 * N);
      for (int i = 0; i < 200; ++i) env.push_back(random_generator(rng, P.ctx, 50 * N));
      const long double logN = std::log(static_cast<long double>(N));
      for (const auto& q : env) {
        hash.add("env:" + std::to_string(d) + ":" + std::to_string(N) + ":" + to_string(q, d));
        PsiValue v = psi(q, P);
        long double n = static_cast<long double>(P.ctx.norm(q).get_d());
        long double e = std::exp(-std::numbers::pi_v<long double> * kEnvelopeD * P.C_exp * n / N) * logN;
        env_max = std::max(env_max, std::max(v.psi, v.psi_tilde) / e);
      }
    }
  double fsize = 0;
  for (const auto& c : weights_corpus(100, 5)) {
    hash.add("F:" + std::to_string(c.d) + ":" + std::to_string(c.N) + ":" + std::to_string(c.delta) + ":" +
             to_string(c.q, c.d));
    WeightParams P = params_for(c);
    double n = P.ctx.norm(c.q).get_d();
    fsize = std::max(fsize, F_direct(c.q, P).value / (1 + c.delta * c.delta * n / static_cast<double>(c.N)));
  }
  out["psi_floor"] = {{"observed", static_cast<double>(floor_min)}, {"fitted", static_cast<double>(floor_min) / kFitSafety}};
  out["psi_envelope_K"] = {{"observed", static_cast<double>(env_max)}, {"fitted", static_cast<double>(env_max) * kFitSafety}};
  out["F_size_C"] = {{"observed", fsize}, {"fitted", fsize * kFitSafety}};
  out["corpus_hash"] = hash.hex();
  return out;
}

std::vector<FitSection> fit_sections() {
  return {
      {"root_constants", fit_root_constants},
      {"theta", fit_theta},
      {"kernel", fit_kernel},
      {"weights", fit_weights},
  };
}

}  // namespace qda
