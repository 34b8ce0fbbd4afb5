#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qda/approx.hpp"
#include "qda/cli.hpp"
#include "qda/congsums.hpp"
#include "qda/errors.hpp"
#include "qda/hunt.hpp"
#include "qda/qforms.hpp"
#include "qda/quadfield.hpp"
#include "qda/sieve.hpp"
#include "qda/weights.hpp"

namespace py = pybind11;
using namespace qda;

namespace {

py::object to_py(const mpz_class& z) {
  return py::reinterpret_steal<py::object>(PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

mpz_class from_py(const py::object& o) {
  mpz_class z;
  if (z.set_str(py::str(o).cast<std::string>(), 10) != 0) throw py::type_error("expected an integer");
  return z;
}

py::tuple pair(const QuadInt& q) { return py::make_tuple(to_py(q.a), to_py(q.b)); }

QuadInt quad(const py::object& a, const py::object& b) { return {from_py(a), from_py(b)}; }

WeightParams weight_params(long d, long N, double delta, const std::string& x1, const std::string& x2, int C_exp,
                           long prec) {
  WeightParams P;
  P.N = N;
  P.delta = delta;
  P.C_exp = C_exp;
  P.ctx = FieldCtx::make(d, prec);
  P.target = RealPair::parse(x1, x2, prec);
  P.validate();
  return P;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Real quadratic field approximation toolkit";

  static py::exception<Error> qda_error(m, "QdaError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = qda_error;
      PyErr_SetObject(err.ptr(), py::make_tuple(to_string(e.kind()), e.what()).ptr());
    }
  });

  m.def("fundamental_unit", [](long d) { return pair(fundamental_unit(d)); }, py::arg("d"));
  m.def("norm", [](const py::object& a, const py::object& b, long d) { return to_py(norm(quad(a, b), d)); },
        py::arg("a"), py::arg("b"), py::arg("d"));
  m.def(
      "canonical",
      [](const py::object& a, const py::object& b, long d) { return pair(canonical(quad(a, b), FieldCtx::make(d))); },
      py::arg("a"), py::arg("b"), py::arg("d"));
  m.def(
      "prime_elements",
      [](long d, long norm_max) {
        py::list out;
        for (const auto& p : enumerate_prime_elements(FieldCtx::make(d), norm_max))
          out.append(py::make_tuple(to_py(p.norm), to_string(p.kind), to_py(p.rational_prime), pair(p.gen)));
        return out;
      },
      py::arg("d"), py::arg("norm_max"));

  m.def(
      "approx_root",
      [](const py::object& Q, const py::object& omega, long d) {
        RootApprox r = approx_root(from_py(Q), from_py(omega), d);
        py::dict o;
        o["u"] = to_py(r.u);
        o["r"] = to_py(r.r);
        o["err_num"] = to_py(r.err.get_num());
        o["err_den"] = to_py(r.err.get_den());
        return o;
      },
      py::arg("Q"), py::arg("omega"), py::arg("d"));
  m.def("theta_count", [](i64 X, i64 a, i64 b, i64 W) { return theta_count(ThetaQuery{X, a, b, W, 0}); },
        py::arg("X"), py::arg("a"), py::arg("b"), py::arg("W"));
  m.def("system_count", &system_count, py::arg("U"), py::arg("V"), py::arg("a"), py::arg("b"), py::arg("W"),
        py::arg("d"));
  m.def(
      "kernel_sum",
      [](double H, double X, const py::object& num, const py::object& den) {
        return kernel_sum_rational(H, X, from_py(num), from_py(den)).to_double();
      },
      py::arg("H"), py::arg("X"), py::arg("num"), py::arg("den"));

  m.def(
      "good_pair",
      [](long d, int steps, long prec, int digits) {
        return good_pair_json(construct_good_pair(FieldCtx::make(d, prec), steps), digits);
      },
      py::arg("d") = 3, py::arg("steps") = 3, py::arg("precision") = 192, py::arg("digits") = 50);

  m.def(
      "weights",
      [](const py::object& a, const py::object& b, long d, long N, double delta, const std::string& x1,
         const std::string& x2, int C_exp) {
        WeightParams P = weight_params(d, N, delta, x1, x2, C_exp, 128);
        WeightSample s = weight_sample(quad(a, b), P);
        py::dict o;
        o["psi"] = s.psi;
        o["psi_tilde"] = s.psi_tilde;
        o["F_direct"] = s.F_direct;
        o["F_poisson"] = s.F_poisson;
        o["omega"] = s.omega;
        o["omega_tilde"] = s.omega_tilde;
        return o;
      },
      py::arg("a"), py::arg("b"), py::arg("d"), py::arg("N"), py::arg("delta"), py::arg("x1"), py::arg("x2"),
      py::arg("C_exp") = kDefaultCExp);

  m.def(
      "sieve_identity",
      [](long d, long support_max, double z) {
        IdealTable T = IdealTable::build(FieldCtx::make(d), support_max);
        IdealWeight w;
        for (std::size_t i = 0; i < T.ideals.size(); ++i) w[static_cast<int>(i)] = 1;
        return py::make_tuple(to_py(s_of_w(T, w, z).get_num()), to_py(s_via_mobius(T, w, z).get_num()));
      },
      py::arg("d"), py::arg("support_max"), py::arg("z"));

  m.def(
      "hunt",
      [](long d, const std::string& x1, const std::string& x2, long norm_max, int k_window, int workers, long prec) {
        FieldCtx ctx = FieldCtx::make(d, prec);
        HuntResult r;
        {
          py::gil_scoped_release nogil;
          r = scan(RealPair::parse(x1, x2, prec), ctx, norm_max, k_window, workers);
        }
        py::list out;
        for (const auto& h : r.records)
          out.append(py::make_tuple(h.norm, h.k_offset, pair(h.p), pair(h.gen), h.err1.to_double(),
                                    h.err2.to_double(), h.nu_eff));
        return out;
      },
      py::arg("d"), py::arg("x1"), py::arg("x2"), py::arg("norm_max"), py::arg("k_window") = 3,
      py::arg("workers") = 1, py::arg("precision") = 192);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream o, e;
        int code = dispatch(args, o, e);
        return py::make_tuple(code, o.str(), e.str());
      },
      py::arg("args"), "Run a CLI subcommand in process; returns (exit_code, stdout, stderr).");
}
