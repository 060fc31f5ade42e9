#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "schatten/cli.hpp"
#include "schatten/config.hpp"
#include "schatten/errors.hpp"
#include "schatten/exponents.hpp"
#include "schatten/hartree.hpp"
#include "schatten/linop.hpp"
#include "schatten/record.hpp"
#include "schatten/strichartz.hpp"

namespace py = pybind11;
using namespace schatten;

namespace {

std::vector<cplx> field_values(const Field& f) { return f.values; }

py::dict moments_dict(const MomentTable& t) {
  py::list rows;
  for (const auto& r : t.rows) rows.append(py::dict(py::arg("r") = r.r, py::arg("value") = r.value, py::arg("stderr") = r.std_error));
  return py::dict(py::arg("rows") = rows, py::arg("samples") = t.samples, py::arg("slope") = t.fit.slope,
                  py::arg("ci_low") = t.fit.ci_low, py::arg("ci_high") = t.fit.ci_high,
                  py::arg("monotone") = moments_monotone(t));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Schatten-class Strichartz and Hartree experiments";
  py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_RuntimeError);
  m.attr("version") = version_string();

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, double>(), py::arg("dim"), py::arg("n"), py::arg("length"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("n", &Grid::n)
      .def_property_readonly("length", &Grid::length)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("cell_volume", &Grid::cell_volume)
      .def_property_readonly("size", &Grid::size)
      .def("position", &Grid::position)
      .def("frequency", &Grid::frequency)
      .def("__repr__", [](const Grid& g) {
        std::ostringstream s;
        s << "Grid(dim=" << g.dim() << ", n=" << g.n() << ", length=" << g.length() << ")";
        return s.str();
      });

  py::class_<LowRankOperator>(m, "LowRankOperator")
      .def(py::init<const Grid&, Eigen::VectorXcd, Eigen::MatrixXcd, Eigen::MatrixXcd>(), py::arg("grid"),
           py::arg("coeffs"), py::arg("left"), py::arg("right"),
           "A = sum_n c_n |u_n><v_n| with u_n, v_n the columns of left, right")
      .def_readonly("grid", &LowRankOperator::grid)
      .def_readonly("coeffs", &LowRankOperator::coeffs)
      .def_property_readonly("rank", &LowRankOperator::rank)
      .def("schatten_norm", [](const LowRankOperator& a, double alpha) { return schatten_norm(a, alpha).value; },
           py::arg("alpha"))
      .def("singular_values", [](const LowRankOperator& a) { return schatten_norm(a, 2.0).singular_values; })
      .def("density", [](const LowRankOperator& a) { return field_values(density(a)); })
      .def("trace", [](const LowRankOperator& a) { return trace(a); })
      .def("conjugate_free", [](const LowRankOperator& a, double t) { return conjugate_free(a, t); }, py::arg("t"))
      .def("dense_kernel", [](const LowRankOperator& a) { return to_dense(a).kernel; });

  m.def("dense_schatten_norm",
        [](const Grid& g, const Eigen::MatrixXcd& kernel, double alpha) {
          return schatten_norm(DenseOperator(g, kernel), alpha).value;
        },
        py::arg("grid"), py::arg("kernel"), py::arg("alpha"), "Schatten norm of the operator with kernel K (weight h^d)");

  m.def("region_membership",
        [](int d, const std::string& sigma, const std::string& p, const std::string& q) {
          return to_string(RegionABCD(d, parse_rational(sigma)).classify({parse_reciprocal(q), parse_reciprocal(p)}));
        },
        py::arg("d"), py::arg("sigma"), py::arg("p"), py::arg("q"));
  m.def("singular_regime_exponents",
        [](const std::string& p, const std::string& q, const std::string& sigma, int d) {
          const auto e = singular_regime_exponents(parse_rational(p), parse_rational(q), parse_rational(sigma), d);
          py::dict out(py::arg("alpha") = to_string(e.alpha), py::arg("r_min") = to_string(e.r_min),
                       py::arg("membership") = to_string(e.membership));
          if (e.sharp_defined) out["sharp_alpha"] = to_string(e.sharp_alpha);
          return out;
        },
        py::arg("p"), py::arg("q"), py::arg("sigma"), py::arg("d"));
  m.def("deterministic_sharp_alpha",
        [](const std::string& q, int d) { return to_string(deterministic_sharp_alpha(parse_rational(q), d)); },
        py::arg("q"), py::arg("d"));

  m.def("strichartz",
        [](const std::string& kind, const std::string& config_path) {
          auto cfg = Config::load(config_path);
          const auto ec = experiment_from_config(cfg);
          cfg.reject_unused();
          lab::ExperimentResult res;
          {
            py::gil_scoped_release release;
            if (kind == "singular") res = lab::run_singular(ec);
            else if (kind == "full") res = lab::run_full(ec);
            else if (kind == "function") res = lab::run_function(ec);
            else throw std::invalid_argument("unknown experiment " + kind);
          }
          py::dict out = moments_dict(res.table);
          out["data_norm"] = res.data_norm;
          out["draws"] = res.samples;
          return out;
        },
        py::arg("kind"), py::arg("config"), "Monte Carlo moment experiment ('singular', 'full' or 'function')");

  m.def("hartree_solve",
        [](const std::string& config_path) {
          auto cfg = Config::load(config_path);
          const auto setup = hartree_from_config(cfg);
          const auto opt = picard_from_config(cfg, setup);
          cfg.reject_unused();
          const auto q0 = to_dense(lab::make_initial_operator(setup.grid, setup.initial, setup.seed));
          hartree::HartreeRun run(setup.grid);
          {
            py::gil_scoped_release release;
            run = hartree::picard_solve(q0, setup.background, opt);
          }
          std::vector<double> hs, rho;
          for (const auto& q : run.q) hs.push_back(hilbert_schmidt_norm(q));
          for (const auto& r : run.rho) rho.push_back(l2_norm(r));
          return py::dict(py::arg("times") = run.times, py::arg("hs_norm") = hs, py::arg("rho_l2") = rho,
                          py::arg("T") = run.T, py::arg("iterations") = run.iterations,
                          py::arg("halvings") = run.halvings, py::arg("deltas") = run.deltas,
                          py::arg("status") = run.status);
        },
        py::arg("config"), "Picard solve of the Hartree equation for Q");

  m.def("calibrate_l1",
        [](int d, int n, double length, double dt, std::size_t steps, std::size_t probes, std::uint64_t seed) {
          const auto bg = hartree::make_background(Grid(d, n, length), "gaussian", 0.5, "delta", 1.0);
          const auto c = hartree::calibrate_l1_constant(bg, dt, steps, probes, seed);
          return py::dict(py::arg("c0") = c.c0, py::arg("residual") = c.residual, py::arg("imag") = c.imag);
        },
        py::arg("d"), py::arg("n"), py::arg("length"), py::arg("dt") = 0.02, py::arg("steps") = 20,
        py::arg("probes") = 4, py::arg("seed") = 1);

  m.def("cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "schatten_lab");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line interface in-process; returns (exit code, stdout, stderr)");
}
