#include "qda/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qda/approx.hpp"
#include "qda/congsums.hpp"
#include "qda/errors.hpp"
#include "qda/hunt.hpp"
#include "qda/qforms.hpp"
#include "qda/sieve.hpp"
#include "qda/weights.hpp"

namespace qda {

std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorKind::invalid_input, "config line " + std::to_string(lineno) + ": expected key=value");
    std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (k.empty()) fail(ErrorKind::invalid_input, "config line " + std::to_string(lineno) + ": empty key");
    kv.emplace_back(k, v);
  }
  return kv;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

nlohmann::ordered_json cell(const std::string& s) {
  if (s.empty()) return s;
  const bool integral = std::all_of(s.begin() + (s[0] == '-'), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  if (integral && s.size() <= 18 && s != "-") return std::stoll(s);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (!integral && end == s.c_str() + s.size() && std::isfinite(v)) return v;
  return s;
}

}  // namespace

std::string csv_to_json(const std::string& csv) {
  std::vector<std::string> lines = split(csv, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  if (lines.empty()) return arr.dump(2) + "\n";
  std::vector<std::string> header = split(lines[0], ',');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> cells = split(lines[i], ',');
    nlohmann::ordered_json row;
    for (std::size_t c = 0; c < header.size(); ++c) row[header[c]] = cell(c < cells.size() ? cells[c] : "");
    arr.push_back(row);
  }
  return arr.dump(2) + "\n";
}

namespace {

struct Global {
  std::string config, out, format;
  int workers = std::max(1u, std::thread::hardware_concurrency());
  long precision = 192;
  double trunc_tol = 1e-30;
  std::uint64_t seed = 1;
};

long as_count(double v, const std::string& name) {
  if (!(v >= 0) || v > 9e15 || v != std::floor(v)) fail(ErrorKind::invalid_input, name + " must be a nonnegative integer");
  return static_cast<long>(v);
}

mpz_class as_mpz(const std::string& s, const std::string& name) {
  mpz_class z;
  if (s.empty() || z.set_str(s, 10) != 0) fail(ErrorKind::invalid_input, name + ": not an integer: '" + s + "'");
  return z;
}

// "p/q" or a decimal literal, read exactly
mpq_class as_mpq(const std::string& s) {
  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpq_class q(as_mpz(s.substr(0, slash), "gamma"), as_mpz(s.substr(slash + 1), "gamma"));
    if (q.get_den() == 0) fail(ErrorKind::invalid_input, "gamma: zero denominator");
    q.canonicalize();
    return q;
  }
  std::string t = s;
  bool neg = !t.empty() && t[0] == '-';
  if (neg) t.erase(0, 1);
  auto dot = t.find('.');
  std::string ip = t.substr(0, dot), fp = dot == std::string::npos ? "" : t.substr(dot + 1);
  if ((ip + fp).empty() || !std::all_of(fp.begin(), fp.end(), ::isdigit))
    fail(ErrorKind::invalid_input, "gamma: expected p/q or a decimal, got '" + s + "'");
  mpz_class den = 1;
  for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
  mpq_class q(as_mpz((ip.empty() ? "0" : ip) + fp, "gamma"), den);
  q.canonicalize();
  return neg ? mpq_class(-q) : q;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::invalid_input, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RealPair resolve_target(const std::string& target, long d, int steps, long budget, Bits prec) {
  if (target == "good") return construct_good_pair(FieldCtx::make(d, prec), steps, budget).x;
  return target_from_json(read_file(target), prec);
}

template <class F>
void strided(int workers, std::size_t n, F&& f) {
  workers = std::max(1, workers);
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(workers));
  auto run = [&](int w) {
    try {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(workers)) f(i);
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
}

// Continued-fraction convergent u/r of gamma minimizing the kernel bound.
std::pair<mpz_class, mpz_class> best_convergent(const mpq_class& g, double H, double X) {
  mpz_class p0 = 1, q0 = 0, p1, q1 = 1, num = g.get_num(), den = g.get_den();
  mpz_fdiv_q(p1.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  mpz_class rem = num - p1 * den;
  std::pair<mpz_class, mpz_class> best{p1, q1};
  double best_b = (1 + H) * (X + 1) * std::log(2.0);
  while (rem != 0) {
    num = den;
    den = rem;
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    rem = num - a * den;
    mpz_class p2 = a * p1 + p0, q2 = a * q1 + q0;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    double r = q1.get_d();
    double b = (1 + H / r) * (X + r) * std::log(2 * r);
    if (b < best_b) best_b = b, best = {p1, q1};
    if (r > 1e15) break;
  }
  return best;
}

int exit_for(const Error& e) { return e.kind() == ErrorKind::budget_exhausted ? kExitBudget : kExitInput; }

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diophantine approximation in real quadratic fields", "qda"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  Global G;
  app.add_option("--config", G.config, "Flat key=value file; flags override it");
  app.add_option("--out", G.out, "Write results to this file instead of stdout");
  app.add_option("--format", G.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", G.workers, "Worker threads")->check(CLI::Range(1, 256));
  app.add_option("--precision", G.precision, "Working precision in bits")->check(CLI::Range(64, 8192));
  app.add_option("--trunc-tol", G.trunc_tol, "Series truncation tolerance");
  app.add_option("--seed", G.seed, "Seed for sampled corpora");

  long d = 3;
  auto add_d = [&](CLI::App* s) { s->add_option("--d", d, "Squarefree d = 3 mod 4"); };

  auto* unit = app.add_subcommand("unit", "Fundamental unit of Z[sqrt d]");
  add_d(unit);

  auto* approx = app.add_subcommand("approx", "Reduce one approximant, or run the Dirichlet search for a target");
  add_d(approx);
  std::string su, sv, sf, sg, target = "good";
  double W_min = 2, W_max = 1e5, c_bound = kDefaultCSearch;
  int steps = 3;
  double budget = static_cast<double>(kDefaultPrimeBudget);
  approx->add_option("--u", su);
  approx->add_option("--v", sv);
  approx->add_option("--f", sf, "Approximant f + g sqrt d; with --g, reduce it instead of searching");
  approx->add_option("--g", sg);
  approx->add_option("--target", target, "good or a JSON file with x1, x2");
  approx->add_option("--steps", steps, "Construction steps for --target good");
  approx->add_option("--W-min", W_min);
  approx->add_option("--W-max", W_max, "Upper end of the Dirichlet search range");
  approx->add_option("--c-bound", c_bound);

  auto* good = app.add_subcommand("good-pair", "Construct a good target pair");
  add_d(good);
  int digits = 50;
  good->add_option("--steps", steps);
  good->add_option("--budget", budget, "Prime-search candidate budget");
  good->add_option("--digits", digits, "Decimal digits printed for x1, x2");

  auto* qroot = app.add_subcommand("qroot", "Rational approximation of omega/Q from a quadratic form");
  add_d(qroot);
  std::string sQ, somega;
  qroot->add_option("--Q", sQ)->required();
  qroot->add_option("--omega", somega)->required();

  auto* theta = app.add_subcommand("theta", "Count |A|, |B| <= X with bB = aA mod W");
  add_d(theta);
  i64 tX = 0, ta = 0, tb = 0, tW = 1, tZ = 0;
  theta->add_option("--X", tX)->required();
  theta->add_option("--a", ta)->required();
  theta->add_option("--b", tb)->required();
  theta->add_option("--W", tW)->required();
  theta->add_option("--Z", tZ, "gcd(f, g) of the source approximant; 0 derives it");

  auto* kernel = app.add_subcommand("kernel-sum", "sum_h min(X, ||h gamma||^-1) against its bound");
  double kH = 0, kX = 1;
  std::string kgamma, ku, kr;
  kernel->add_option("--H", kH)->required();
  kernel->add_option("--X", kX)->required();
  kernel->add_option("--gamma", kgamma, "p/q or a decimal, taken exactly")->required();
  kernel->add_option("--u", ku, "Certificate numerator (default: best convergent)");
  kernel->add_option("--r", kr, "Certificate denominator");

  auto* wcheck = app.add_subcommand("weights-check", "Weight samples with the Poisson cross-check");
  add_d(wcheck);
  double N = 1000, delta = 1;
  int samples = 20, C_exp = kDefaultCExp;
  std::string x1 = "0.3", x2 = "0.7";
  wcheck->add_option("--N", N);
  wcheck->add_option("--delta", delta);
  wcheck->add_option("--samples", samples)->check(CLI::Range(1, 100000));
  wcheck->add_option("--C", C_exp, "Exponent of the smoothing function");
  wcheck->add_option("--x1", x1);
  wcheck->add_option("--x2", x2);

  auto* scheck = app.add_subcommand("sieve-check", "Exact sieve identities on finite weights");
  add_d(scheck);
  double sz = 30, sx = 1000, sM = 100, smu = 0.4, support_max = 1000;
  scheck->add_option("--z", sz);
  scheck->add_option("--x", sx);
  scheck->add_option("--M", sM);
  scheck->add_option("--mu", smu);
  scheck->add_option("--support-max", support_max, "Largest norm in the ideal table");
  scheck->add_option("--N", N);
  scheck->add_option("--delta", delta);
  scheck->add_option("--x1", x1);
  scheck->add_option("--x2", x2);

  auto* hunt = app.add_subcommand("hunt", "Scan prime ideals for good approximations of a target");
  add_d(hunt);
  double norm_max = 1e5;
  int k_window = 3;
  hunt->add_option("--target", target, "good or a JSON file with x1, x2");
  hunt->add_option("--steps", steps, "Construction steps for --target good");
  hunt->add_option("--norm-max", norm_max, "Largest prime ideal norm scanned (at most 1e8)");
  hunt->add_option("--k-window", k_window)->check(CLI::Range(0, 50));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInput;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    if (!G.config.empty()) {
      for (const auto& [k, v] : parse_config(read_file(G.config))) {
        if (k == "config") continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + k);
        if (!opt) opt = app.get_option_no_throw("--" + k);
        if (!opt) {
          // keys meant for other subcommands are fine in a shared file
          bool known = false;
          for (const CLI::App* other : app.get_subcommands({}))
            known = known || other->get_option_no_throw("--" + k) != nullptr;
          if (!known) fail(ErrorKind::invalid_input, "unknown config key '" + k + "'");
          continue;
        }
        if (opt->count() > 0) continue;
        opt->add_result(v);
        try {
          opt->run_callback();
        } catch (const CLI::ParseError& e) {
          fail(ErrorKind::invalid_input, "config key '" + k + "': " + e.what());
        }
      }
    }
    const Bits prec = G.precision;
    const std::string name = sub->get_name();
    std::ostringstream res;
    std::string natural = "csv";

    if (name == "unit") {
      QuadInt e = fundamental_unit(d);
      if (G.format.empty()) res << to_string(e, d) << "\n";
      else res << "d,eps_a,eps_b\n" << d << ',' << e.a << ',' << e.b << "\n";
    } else if (name == "approx") {
      FieldCtx ctx = FieldCtx::make(d, prec, G.trunc_tol);
      write_approximant_csv_header(res);
      if (!sf.empty() || !sg.empty()) {
        Approximant a = reduce_approximant(as_mpz(su.empty() ? "0" : su, "u"), as_mpz(sv.empty() ? "0" : sv, "v"),
                                           as_mpz(sf.empty() ? "0" : sf, "f"), as_mpz(sg.empty() ? "0" : sg, "g"), ctx);
        write_approximant_csv_row(res, a);
      } else {
        RealPair x = resolve_target(target, d, steps, static_cast<long>(budget), prec);
        auto r = dirichlet_search(x, ctx, as_count(W_min, "W-min"), as_count(W_max, "W-max"), c_bound, G.workers);
        for (const auto& h : r.hits) write_approximant_csv_row(res, h.ap);
      }
    } else if (name == "good-pair") {
      natural = "json";
      GoodPair gp = construct_good_pair(FieldCtx::make(d, prec, G.trunc_tol), steps, as_count(budget, "budget"));
      if (G.format == "csv") {
        write_approximant_csv_header(res);
        for (const auto& a : gp.approximants) write_approximant_csv_row(res, a);
      } else {
        res << good_pair_json(gp, digits) << "\n";
      }
    } else if (name == "qroot") {
      write_root_csv_header(res);
      write_root_csv_row(res, approx_root(as_mpz(sQ, "Q"), as_mpz(somega, "omega"), d));
    } else if (name == "theta") {
      ThetaQuery q{tX, ta, tb, tW, tZ};
      write_theta_csv_header(res);
      write_theta_csv_row(res, q, theta_bound_check(q, d));
    } else if (name == "kernel-sum") {
      mpq_class g = as_mpq(kgamma);
      auto [u, r] = best_convergent(g, kH, kX);
      if (!ku.empty() || !kr.empty()) {
        if (ku.empty() || kr.empty()) fail(ErrorKind::invalid_input, "--u and --r go together");
        u = as_mpz(ku, "u");
        r = as_mpz(kr, "r");
      }
      KernelBound kb = kernel_bound_check_rational(kH, kX, g, u, r);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", kb.sum, kb.bound, kb.ratio);
      res << "H,X,gamma,u,r,sum,bound,ratio\n" << kH << ',' << kX << ',' << g.get_str() << ',' << u << ',' << r << ','
          << buf << "\n";
    } else if (name == "weights-check") {
      WeightParams P;
      P.N = as_count(N, "N");
      P.delta = delta;
      P.C_exp = C_exp;
      P.ctx = FieldCtx::make(d, prec, G.trunc_tol);
      P.target = RealPair::parse(x1, x2, prec);
      P.validate();
      std::mt19937_64 rng(G.seed);
      std::vector<QuadInt> qs;
      // norms past a few N carry weights below double range
      const long nmax = std::clamp(5 * P.N, 10L, 10000L);
      for (int i = 0; i < samples; ++i) qs.push_back(random_generator(rng, P.ctx, nmax));
      std::vector<WeightSample> rows(qs.size());
      strided(G.workers, qs.size(), [&](std::size_t i) { rows[i] = weight_sample(qs[i], P); });
      write_weight_csv_header(res);
      for (const auto& s : rows) write_weight_csv_row(res, s);
    } else if (name == "sieve-check") {
      natural = "json";
      FieldCtx ctx = FieldCtx::make(d, prec, G.trunc_tol);
      require(sz > 1 && sx >= 3, "sieve-check needs z > 1 and x >= 3");
      SieveParams p{sx, smu, std::log(sz) / std::log(sx), sM};
      p.validate();
      WeightParams P;
      P.N = as_count(N, "N");
      P.delta = delta;
      P.ctx = ctx;
      P.target = RealPair::parse(x1, x2, prec);
      P.validate();
      const long smax = as_count(support_max, "support-max");
      require(smax >= 1, "support-max must be >= 1");
      IdealTable T = IdealTable::build(ctx, std::max(smax, default_norm_max(P)));

      IdealWeight ind, g;
      const double xmu = std::pow(sx, smu);
      for (std::size_t i = 0; i < T.ideals.size() && T.ideals[i].norm <= smax; ++i) {
        ind[static_cast<int>(i)] = 1;
        if (static_cast<double>(T.ideals[i].norm) > xmu) g[static_cast<int>(i)] = 1;
      }
      mpq_class direct = s_of_w(T, ind, p.z()), mob = s_via_mobius(T, ind, p.z());
      BuchstabReport br = buchstab_check(T, g, p, default_order(T, p.z()));
      BuchstabReport br2 = buchstab_check(T, g, p, reversed_tie_order(T, p.z()));
      auto [om, omt] = omega_weights(T, P, G.workers);
      TypeSplit ts = type_split(T, om, omt, p);

      nlohmann::ordered_json j;
      j["d"] = d;
      j["x"] = sx;
      j["mu"] = smu;
      j["kappa"] = p.kappa;
      j["z"] = sz;
      j["M"] = sM;
      j["support_max"] = smax;
      j["table_norm_max"] = T.norm_max;
      j["primes_below_z"] = T.prime_count_below(p.z());
      j["s_of_w"] = {{"direct", direct.get_str()}, {"mobius", mob.get_str()}, {"match", direct == mob}};
      j["buchstab"] = nlohmann::ordered_json::parse(buchstab_json(T, br, p));
      j["buchstab"]["second_order_match"] = br2.direct == br.direct && br2.buchstab == br.buchstab;
      char buf[64];
      auto num = [&](const mpq_class& q) {
        std::snprintf(buf, sizeof buf, "%.17g", q.get_d());
        return std::string(buf);
      };
      j["type_split"] = {{"sharp", num(ts.sharp)},
                         {"flat", num(ts.flat)},
                         {"direct", num(ts.direct)},
                         {"rel_err", num(mpq_class(ts.rel_err()))}};
      if (G.format == "csv") {
        res << "identity,lhs,rhs,match\n";
        res << "mobius," << direct.get_str() << ',' << mob.get_str() << ',' << (direct == mob) << "\n";
        res << "buchstab," << br.direct.get_str() << ',' << br.buchstab.get_str() << ',' << br.match() << "\n";
        res << "type_split," << num(ts.sharp + ts.flat) << ',' << num(ts.direct) << ',' << (ts.rel_err() <= 1e-12) << "\n";
      } else {
        res << j.dump(2) << "\n";
      }
    } else if (name == "hunt") {
      FieldCtx ctx = FieldCtx::make(d, prec, G.trunc_tol);
      RealPair x = resolve_target(target, d, steps, static_cast<long>(budget), prec);
      HuntResult r = scan(x, ctx, as_count(norm_max, "norm-max"), k_window, G.workers);
      write_hunt_csv_header(res);
      for (const auto& h : r.records) write_hunt_csv_row(res, h);
      if (!G.out.empty()) {
        std::filesystem::path p(G.out);
        std::filesystem::path rp = p.parent_path() / (p.stem().string() + ".running" + p.extension().string());
        std::ostringstream rs;
        write_hunt_csv_header(rs);
        for (const auto& h : r.running) write_hunt_csv_row(rs, h);
        std::string text = G.format == "json" ? csv_to_json(rs.str()) : rs.str();
        std::ofstream f(rp, std::ios::binary);
        if (!f) fail(ErrorKind::invalid_input, "cannot write '" + rp.string() + "'");
        f << text;
      }
      err << "hunt: " << r.records.size() << " prime ideals, " << r.running.size() << " running records, median |nu_eff| "
          << r.median_abs_nu << (r.degenerate ? ", target in sigma(K): degenerate" : "") << "\n";
    }

    std::string text = res.str();
    const std::string fmt = G.format.empty() ? natural : G.format;
    if (fmt == "json" && natural == "csv" && !(name == "unit" && G.format.empty())) text = csv_to_json(text);
    if (G.out.empty()) {
      out << text;
    } else {
      std::ofstream f(G.out, std::ios::binary);
      if (!f) fail(ErrorKind::invalid_input, "cannot write '" + G.out + "'");
      f << text;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qda
