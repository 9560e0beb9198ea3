#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "nearcommute/commuting_oracle.hpp"
#include "nearcommute/errors.hpp"
#include "nearcommute/gapped_log.hpp"
#include "nearcommute/harness.hpp"
#include "nearcommute/linalg.hpp"
#include "nearcommute/matrix_io.hpp"
#include "nearcommute/pipeline.hpp"
#include "nearcommute/spectral.hpp"

#include <sstream>

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
namespace nc = nearcommute;

namespace {

py::dict gap_dict(const nc::GapInfo& g) {
    py::dict d;
    d["center"] = g.center;
    d["half_width"] = g.half_width;
    d["lo"] = g.lo;
    d["hi"] = g.hi;
    return d;
}

py::dict coeff_dict(const nc::LaurentCoefficients& c) {
    py::dict d;
    d["gamma"] = c.gamma;
    d["order"] = c.order;
    d["coeffs"] = c.coeffs;
    d["decay_constant"] = c.decay_constant;
    d["tail"] = c.tail;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = R"pbdoc(
        Commuting unitary pairs near almost-commuting gapped unitaries.

        Matrices are passed as complex128 numpy arrays.
    )pbdoc";

    auto invalid = py::register_exception<nc::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    auto precondition = py::register_exception<nc::PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<nc::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    (void)invalid;
    (void)precondition;

    // linalg
    m.def("operator_norm", &nc::operator_norm, py::arg("m"));
    m.def("commutator", &nc::commutator, py::arg("m"), py::arg("n"));
    m.def("unitarity_defect", &nc::unitarity_defect, py::arg("m"));
    m.def("hermiticity_defect", &nc::hermiticity_defect, py::arg("m"));
    m.def(
        "herm_exp", [](const nc::Matrix& h) { return nc::herm_exp(nc::HermitianMatrix(h)).matrix(); },
        py::arg("h"), "e^{iH} for Hermitian H");

    // io
    m.def("read_mtxc", &nc::read_mtxc_file, py::arg("path"));
    m.def("write_mtxc", &nc::write_mtxc_file, py::arg("path"), py::arg("m"));
    m.def("format_mtxc", [](const nc::Matrix& mat) {
        std::ostringstream os;
        nc::write_mtxc(os, mat);
        return os.str();
    });
    m.def("parse_mtxc", [](const std::string& text) {
        std::istringstream is(text);
        return nc::read_mtxc(is);
    });

    // spectral
    m.def(
        "unitary_eigensystem",
        [](const nc::Matrix& u) {
            const nc::Eigensystem es = nc::unitary_eigensystem(nc::UnitaryMatrix(u));
            return py::make_tuple(es.angles, es.basis);
        },
        py::arg("u"), "Returns (angles ascending in [0, 2pi), orthonormal basis).");
    m.def("largest_gap", [](const std::vector<double>& angles) { return gap_dict(nc::largest_gap(angles)); },
          py::arg("angles"));
    m.def(
        "center_gap",
        [](const nc::Matrix& u) {
            const nc::CenteredUnitary c = nc::center_gap(nc::UnitaryMatrix(u));
            return py::make_tuple(c.matrix.matrix(), c.phase, gap_dict(c.gap));
        },
        py::arg("u"));

    // gapped_log
    m.def("sawtooth_coefficient", &nc::sawtooth_coefficient, py::arg("k"));
    m.def("kernel_transform", &nc::kernel_transform, py::arg("gamma"), py::arg("t"));
    m.def("smoothed_coefficients",
          [](double gap, double gamma, int order) {
              return coeff_dict(nc::smoothed_coefficients(gap, gamma, order));
          },
          py::arg("gap"), py::arg("gamma"), py::arg("order"));
    m.def("evaluate_smoothed_sawtooth", &nc::evaluate_smoothed_sawtooth, py::arg("theta"),
          py::arg("gamma"), py::arg("order"));
    m.def("choose_truncation", py::overload_cast<double, double, double>(&nc::choose_truncation),
          py::arg("gamma"), py::arg("target"), py::arg("c_est"));
    m.def("choose_truncation", py::overload_cast<double, double>(&nc::choose_truncation),
          py::arg("gamma"), py::arg("target"));
    m.def(
        "gapped_log",
        [](const nc::Matrix& u, double gamma, int order, double target) {
            nc::Tolerances tol = nc::Tolerances::for_dimension(u.rows());
            tol.series_target = target;
            const nc::GappedLog g = nc::gapped_log(nc::UnitaryMatrix(u), gamma, order, tol);
            return py::make_tuple(g.log.matrix(), coeff_dict(g.coeffs));
        },
        py::arg("u"), py::arg("gamma"), py::arg("order") = 0, py::arg("target") = 1e-6,
        "Series logarithm of a unitary with its gap around angle 0. Returns (H, coefficients).");
    m.def("direct_log", [](const nc::Matrix& u) { return nc::direct_log(nc::UnitaryMatrix(u)).matrix(); },
          py::arg("u"));

    // commuting_oracle
    m.def("off_measure", &nc::off_measure, py::arg("a"), py::arg("b"));
    m.def(
        "nearest_commuting_pair",
        [](const nc::Matrix& a, const nc::Matrix& b, int max_sweeps) {
            nc::JadeOptions opts;
            opts.max_sweeps = max_sweeps;
            const auto p = nc::nearest_commuting_pair(nc::HermitianMatrix(a), nc::HermitianMatrix(b), opts);
            py::dict d;
            d["a_prime"] = p.a_prime.matrix();
            d["b_prime"] = p.b_prime.matrix();
            d["basis"] = p.basis;
            d["dist_a"] = p.dist_a;
            d["dist_b"] = p.dist_b;
            d["converged"] = p.converged;
            d["sweeps"] = p.sweeps;
            d["off_history"] = p.off_history;
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("max_sweeps") = 100);

    // pipeline
    m.def(
        "near_commuting_unitaries",
        [](const nc::Matrix& u, const nc::Matrix& v, double min_gap, double target) {
            nc::PipelineOptions opts;
            opts.min_gap = min_gap;
            opts.series_target = target;
            const nc::PipelineResult r =
                nc::near_commuting_unitaries(nc::UnitaryMatrix(u), nc::UnitaryMatrix(v), opts);
            py::dict d;
            d["x"] = r.x.matrix();
            d["y"] = r.y.matrix();
            d["dist_u"] = r.dist_u;
            d["dist_v"] = r.dist_v;
            d["comm_before"] = r.comm_before;
            d["comm_after"] = r.comm_after;
            d["herm_dist_a"] = r.herm_dist_a;
            d["herm_dist_b"] = r.herm_dist_b;
            d["delta1"] = r.bound.delta1;
            d["delta2"] = r.bound.delta2;
            d["alpha_emp"] = r.bound.alpha_emp;
            d["predicted_log_comm"] = r.bound.predicted;
            d["measured_log_comm"] = r.bound.measured_log_comm;
            d["converged"] = r.converged;
            d["checks_passed"] = r.checks.all();
            return d;
        },
        py::arg("u"), py::arg("v"), py::arg("min_gap") = 0.1, py::arg("target") = 1e-6);

    // harness
    m.def("gen_gapped_unitary",
          [](long n, double gap, std::uint64_t seed) { return nc::gen_gapped_unitary(n, gap, seed).matrix(); },
          py::arg("n"), py::arg("gap"), py::arg("seed") = 0);
    m.def(
        "gen_almost_commuting_pair",
        [](long n, double gap, double eps, std::uint64_t seed, bool both) {
            const auto p = nc::gen_almost_commuting_pair(n, gap, eps, seed, both);
            return py::make_tuple(p.u.matrix(), p.v.matrix(), p.eps_actual);
        },
        py::arg("n"), py::arg("gap"), py::arg("eps"), py::arg("seed") = 0, py::arg("perturb_both") = false);
    m.def(
        "gen_voiculescu_pair",
        [](long n) {
            const auto [c, s] = nc::gen_voiculescu_pair(n);
            return py::make_tuple(c.matrix(), s.matrix());
        },
        py::arg("n"));

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
