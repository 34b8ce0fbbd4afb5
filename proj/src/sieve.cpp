#include "qda/sieve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "json.hpp"
#include "qda/errors.hpp"

namespace qda {

int mobius_ideal(const IdealRec& a) {
  for (const auto& [p, e] : a.factorization)
    if (e > 1) return 0;
  return a.factorization.size() % 2 ? -1 : 1;
}

namespace {

IdealKey times_prime(const IdealKey& k, int j) {
  IdealKey out = k;
  auto it = std::lower_bound(out.begin(), out.end(), std::pair{j, 0});
  if (it != out.end() && it->first == j) ++it->second;
  else out.insert(it, {j, 1});
  return out;
}

IdealKey key_product(const IdealKey& a, const IdealKey& b) {
  IdealKey out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) out.push_back(a[i++]);
    else if (i == a.size() || b[j].first < a[i].first) out.push_back(b[j++]);
    else {
      out.push_back({a[i].first, a[i].second + b[j].second});
      ++i, ++j;
    }
  }
  return out;
}

bool key_divides(const IdealKey& d, const IdealKey& b) {
  std::size_t j = 0;
  for (const auto& [p, e] : d) {
    while (j < b.size() && b[j].first < p) ++j;
    if (j == b.size() || b[j].first != p || b[j].second < e) return false;
  }
  return true;
}

// squarefree products of the listed primes with norm <= bound
void squarefree_dfs(const IdealTable& T, const std::vector<int>& ps, long bound,
                    const std::function<void(const IdealKey&, long, int)>& visit) {
  std::function<void(std::size_t, IdealKey&, long, int)> rec = [&](std::size_t from, IdealKey& key, long norm, int sign) {
    visit(key, norm, sign);
    for (std::size_t i = from; i < ps.size(); ++i) {
      long pn = T.primes[static_cast<std::size_t>(ps[i])].norm.get_si();
      if (norm > bound / pn) continue;
      IdealKey next = times_prime(key, ps[i]);
      rec(i + 1, next, norm * pn, -sign);
    }
  };
  IdealKey empty;
  rec(0, empty, 1, 1);
}

std::vector<int> primes_below(const IdealTable& T, double z) {
  std::vector<int> out;
  for (std::size_t i = 0; i < T.primes.size(); ++i)
    if (T.primes[i].norm.get_d() < z) out.push_back(static_cast<int>(i));
  return out;
}

long support_norm(const IdealTable& T, const IdealWeight& w) {
  long m = 1;
  for (const auto& [i, v] : w) m = std::max(m, T.ideals[static_cast<std::size_t>(i)].norm);
  return m;
}

}  // namespace

IdealTable IdealTable::build(const FieldCtx& ctx, long norm_max) {
  require(norm_max >= 1, "IdealTable needs norm_max >= 1");
  IdealTable T;
  T.ctx = ctx;
  T.norm_max = norm_max;
  if (norm_max >= 2) T.primes = enumerate_prime_elements(ctx, norm_max);
  for (auto& p : T.primes) p.gen = canonical(p.gen, ctx);
  std::sort(T.primes.begin(), T.primes.end(), [](const PrimeElem& x, const PrimeElem& y) {
    return std::make_tuple(x.norm, mpz_class(abs(x.gen.a)), x.gen.a, x.gen.b) <
           std::make_tuple(y.norm, mpz_class(abs(y.gen.a)), y.gen.a, y.gen.b);
  });

  std::function<void(std::size_t, const IdealRec&)> rec = [&](std::size_t from, const IdealRec& cur) {
    T.ideals.push_back(cur);
    for (std::size_t j = from; j < T.primes.size(); ++j) {
      const long pn = T.primes[j].norm.get_si();
      if (cur.norm > norm_max / pn) break;
      IdealRec next = cur;
      for (int e = 1; next.norm <= norm_max / pn; ++e) {
        next.norm *= pn;
        next.gen = ctx.mul(next.gen, T.primes[j].gen);
        IdealRec child = next;
        child.gen = canonical(next.gen, ctx);
        child.factorization.push_back({T.primes[j], e});
        child.key.push_back({static_cast<int>(j), e});
        rec(j + 1, child);
      }
    }
  };
  rec(0, IdealRec{});
  std::sort(T.ideals.begin(), T.ideals.end(),
            [](const IdealRec& a, const IdealRec& b) { return std::tie(a.norm, a.key) < std::tie(b.norm, b.key); });
  for (std::size_t i = 0; i < T.ideals.size(); ++i) T.index_[T.ideals[i].key] = static_cast<int>(i);
  return T;
}

int IdealTable::find(const IdealKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

int IdealTable::find_gen(const QuadInt& g) const {
  if (g.is_zero()) return -1;
  QuadInt c = canonical(g, ctx);
  mpz_class n = ctx.norm(c);
  if (n > norm_max) return -1;
  auto lo = std::lower_bound(ideals.begin(), ideals.end(), n.get_si(),
                             [](const IdealRec& r, long v) { return r.norm < v; });
  for (auto it = lo; it != ideals.end() && it->norm == n.get_si(); ++it)
    if (it->gen == c) return static_cast<int>(it - ideals.begin());
  return -1;
}

int IdealTable::prime_count_below(double z) const { return static_cast<int>(primes_below(*this, z).size()); }

mpq_class s_of_w(const IdealTable& T, const IdealWeight& w, double z) {
  mpq_class s = 0;
  for (const auto& [i, v] : w) {
    bool coprime = true;
    for (const auto& [j, e] : T.ideals[static_cast<std::size_t>(i)].key)
      if (T.primes[static_cast<std::size_t>(j)].norm.get_d() < z) coprime = false;
    if (coprime) s += v;
  }
  return s;
}

mpq_class s_via_mobius(const IdealTable& T, const IdealWeight& w, double z) {
  std::vector<int> ps = primes_below(T, z);
  if (ps.size() > 19) fail(ErrorKind::too_many_primes, std::to_string(ps.size()) + " primes below z; 2^count exceeds 1e6");
  mpq_class s = 0;
  squarefree_dfs(T, ps, support_norm(T, w), [&](const IdealKey& d, long, int mu) {
    mpq_class inner = 0;
    for (const auto& [i, v] : w)
      if (key_divides(d, T.ideals[static_cast<std::size_t>(i)].key)) inner += v;
    s += mu * inner;
  });
  return s;
}

double SieveParams::z() const { return std::pow(x, kappa); }

void SieveParams::validate() const {
  require(x >= 3, "sieve x must be >= 3");
  require(mu > 0 && mu < 1, "sieve mu must lie in (0, 1)");
  require(kappa > 0 && kappa <= 0.5, "sieve kappa must lie in (0, 1/2]");
  require(M > std::pow(x, mu) && M < x, "sieve M must lie in (x^mu, x)");
}

std::vector<int> default_order(const IdealTable& T, double z) { return primes_below(T, z); }

std::vector<int> reversed_tie_order(const IdealTable& T, double z) {
  std::vector<int> o = primes_below(T, z);
  for (std::size_t i = 0; i < o.size();) {
    std::size_t j = i;
    while (j < o.size() && T.primes[static_cast<std::size_t>(o[j])].norm == T.primes[static_cast<std::size_t>(o[i])].norm) ++j;
    std::reverse(o.begin() + static_cast<long>(i), o.begin() + static_cast<long>(j));
    i = j;
  }
  return o;
}

BuchstabReport buchstab_check(const IdealTable& T, const IdealWeight& g, const SieveParams& p,
                              const std::vector<int>& order) {
  p.validate();
  const double xmu = std::pow(p.x, p.mu);
  for (const auto& [i, v] : g)
    if (v != 0 && static_cast<double>(T.ideals[static_cast<std::size_t>(i)].norm) <= xmu)
      fail(ErrorKind::invalid_input, "g must vanish on norms <= x^mu");
  std::vector<int> expect = primes_below(T, p.z()), sorted = order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != expect) fail(ErrorKind::order_violation, "order must list every prime of norm < z exactly once");
  for (std::size_t i = 1; i < order.size(); ++i)
    if (T.primes[static_cast<std::size_t>(order[i])].norm < T.primes[static_cast<std::size_t>(order[i - 1])].norm)
      fail(ErrorKind::order_violation, "order is inconsistent with norms");

  auto gval = [&](const IdealKey& k) -> const mpq_class* {
    int idx = T.find(k);
    if (idx < 0) return nullptr;
    auto it = g.find(idx);
    return it == g.end() ? nullptr : &it->second;
  };

  BuchstabReport r;
  r.t = static_cast<int>(std::floor(std::log(p.x) / std::log(2.0))) + 1;
  squarefree_dfs(T, order, T.norm_max, [&](const IdealKey& d, long, int mu) {
    if (const mpq_class* v = gval(d)) r.direct += mu * *v;
  });

  // tuples p_1 > p_2 > ... > p_s in the order; rank = position
  std::function<void(int, std::size_t, const IdealKey&, long)> rec = [&](int s, std::size_t rank_last, const IdealKey& a,
                                                                         long norm) {
    for (std::size_t rk = 0; rk < rank_last; ++rk) {
      const int j = order[rk];
      const long pn = T.primes[static_cast<std::size_t>(j)].norm.get_si();
      if (norm > T.norm_max / pn) continue;  // g vanishes beyond the table
      const long n = norm * pn;
      IdealKey b = times_prime(a, j);
      ++r.tuples;
      if (static_cast<double>(n) > xmu) {
        // P_s: (-1)^s sum over d | Pi(p_s) of mu(d) g(b d)
        std::vector<int> below(order.begin(), order.begin() + static_cast<long>(rk));
        mpq_class inner = 0;
        squarefree_dfs(T, below, T.norm_max / n, [&](const IdealKey& d, long, int mu) {
          if (const mpq_class* v = gval(key_product(b, d))) inner += mu * *v;
        });
        r.buchstab += (s % 2 ? -1 : 1) * inner;
      } else {
        r.max_q_depth = std::max(r.max_q_depth, s);
        if (s < r.t) rec(s + 1, rk, b, n);
      }
    }
  };
  rec(1, order.size(), IdealKey{}, 1);
  r.q_t_empty = r.max_q_depth < r.t;
  return r;
}

double TypeSplit::rel_err() const {
  mpq_class diff = sharp + flat - direct;
  double den = std::max(std::fabs(direct.get_d()), 1e-300);
  return std::fabs(diff.get_d()) / den;
}

TypeSplit type_split(const IdealTable& T, const IdealWeight& omega, const IdealWeight& omega_tilde,
                     const SieveParams& p) {
  p.validate();
  IdealWeight delta = omega;
  for (const auto& [i, v] : omega_tilde) delta[i] -= v;
  TypeSplit out;
  out.direct = s_of_w(T, omega, p.z()) - s_of_w(T, omega_tilde, p.z());
  squarefree_dfs(T, primes_below(T, p.z()), support_norm(T, delta), [&](const IdealKey& d, long n, int mu) {
    mpq_class D = 0;
    for (const auto& [i, v] : delta)
      if (key_divides(d, T.ideals[static_cast<std::size_t>(i)].key)) D += v;
    (static_cast<double>(n) < p.M ? out.sharp : out.flat) += mu * D;
  });
  return out;
}

std::pair<IdealWeight, IdealWeight> omega_weights(const IdealTable& T, const WeightParams& P, int workers) {
  require(T.ctx.d == P.ctx.d, "omega_weights: field mismatch");
  double tail = envelope_tail(P, T.norm_max);
  if (tail >= 1e-9)
    fail(ErrorKind::truncation_insufficient,
         "ideal table to norm " + std::to_string(T.norm_max) + " leaves envelope tail " + std::to_string(tail));
  const std::size_t n = T.ideals.size();
  std::vector<double> om(n), omt(n);
  const double pref = P.delta * P.delta / (2 * std::sqrt(static_cast<double>(P.ctx.d)));
  workers = std::max(1, workers);
  auto run = [&](int w) {
    for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers)) {
      PsiValue ps = psi(T.ideals[i].gen, P);
      om[i] = pref * static_cast<double>(ps.psi);
      omt[i] = static_cast<double>(ps.psi_tilde) * F_direct(T.ideals[i].gen, P).value;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> ts;
    for (int w = 0; w < workers; ++w) ts.emplace_back(run, w);
    for (auto& t : ts) t.join();
  }
  IdealWeight a, b;
  for (std::size_t i = 0; i < n; ++i) {
    a[static_cast<int>(i)] = mpq_class(om[i]);
    b[static_cast<int>(i)] = mpq_class(omt[i]);
  }
  return {a, b};
}

std::string buchstab_json(const IdealTable& T, const BuchstabReport& r, const SieveParams& p) {
  nlohmann::ordered_json j;
  j["d"] = T.ctx.d;
  j["x"] = p.x;
  j["mu"] = p.mu;
  j["kappa"] = p.kappa;
  j["M"] = p.M;
  j["z"] = p.z();
  j["support_max"] = T.norm_max;
  j["direct"] = r.direct.get_str();
  j["buchstab"] = r.buchstab.get_str();
  j["match"] = r.match();
  j["t"] = r.t;
  j["max_q_depth"] = r.max_q_depth;
  j["q_t_empty"] = r.q_t_empty;
  j["tuples"] = r.tuples;
  return j.dump(2);
}

}  // namespace qda
