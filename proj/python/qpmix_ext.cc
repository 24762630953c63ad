#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <limits>
#include <sstream>

#include "qpmix/circuits.h"
#include "qpmix/errors.h"
#include "qpmix/estimator.h"
#include "qpmix/experiment.h"
#include "qpmix/mixture.h"
#include "qpmix/noise.h"
#include "qpmix/oracle.h"
#include "qpmix/pauli.h"

namespace py = pybind11;
using namespace qpmix;

namespace {

ErrorModel make_error(const std::string &kind, double epsilon, std::optional<std::array<double, 3>> direction) {
    if (kind == "none") return NoError{};
    if (kind == "constant") return ConstantOverRotation{epsilon};
    if (kind == "uniform") return UniformOverRotation{epsilon};
    if (kind == "unstructured") {
        if (!direction) throw ArgumentError("unstructured error needs a direction");
        return build_unstructured(epsilon, *direction);
    }
    throw ArgumentError("unknown error kind '" + kind + "'");
}

py::dict result_dict(const EstimatorResult &r) {
    py::dict d;
    d["mean"] = r.mean;
    d["empirical_std"] = r.empirical_std;
    d["standard_error"] = r.standard_error();
    d["instance_standard_error"] = r.instance_standard_error();
    d["variance_bound"] = r.variance_bound;
    d["S"] = r.total_shots;
    d["s"] = r.shots_per_instance;
    d["n_instances"] = r.n_instances;
    d["seed"] = r.seed;
    d["mean_t_insertions"] = r.mean_t_insertions();
    d["weighted_samples"] = py::array_t<double>(static_cast<py::ssize_t>(r.weighted_samples.size()),
                                                r.weighted_samples.data());
    return d;
}

CircuitSpec trotter(size_t n, size_t steps, double time, double h, double j, const std::string &kind, double epsilon,
                    std::optional<std::array<double, 3>> direction, const std::string &policy) {
    return attach_errors(compile_to_rz(build_trotter_ising(n, steps, time, h, j)), make_error(kind, epsilon, direction),
                         parse_mitigation(policy));
}

}  // namespace

PYBIND11_MODULE(_qpmix, m) {
    m.doc() = "Signed-mixture mitigation of coherent rotation errors";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
    py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
    py::register_exception<OutOfRegimeError>(m, "OutOfRegimeError", PyExc_ValueError);

    py::class_<PauliString>(m, "PauliString")
        .def(py::init([](const std::string &text) { return PauliString::from_str(text); }))
        .def_static("all_z", &PauliString::all_z)
        .def_property_readonly("n_qubits", &PauliString::n_qubits)
        .def("weight", &PauliString::weight)
        .def("commutes", [](const PauliString &p, const PauliString &q) { return commutes(p, q); })
        .def("__str__", &PauliString::str)
        .def("__repr__", [](const PauliString &p) { return "PauliString('" + p.str() + "')"; })
        .def(py::self == py::self);

    py::class_<GammaTriple>(m, "GammaTriple")
        .def_readonly("gamma1", &GammaTriple::gamma1)
        .def_readonly("gamma2", &GammaTriple::gamma2)
        .def_readonly("gamma3", &GammaTriple::gamma3)
        .def_readonly("epsilon", &GammaTriple::epsilon)
        .def_readonly("offset_a", &GammaTriple::offset_a)
        .def_readonly("offset_b", &GammaTriple::offset_b)
        .def_readonly("one_norm", &GammaTriple::one_norm)
        .def("probability", &GammaTriple::probability)
        .def("__repr__", [](const GammaTriple &g) {
            std::ostringstream s;
            s << "GammaTriple(" << g.gamma1 << ", " << g.gamma2 << ", " << g.gamma3 << ")";
            return s.str();
        });

    m.def("gamma_default", &gamma_default, py::arg("epsilon"), py::arg("max_abs_epsilon") = kDefaultMaxEpsilon);
    m.def("gamma_general", &gamma_general, py::arg("epsilon"), py::arg("offset_a"), py::arg("offset_b"),
          py::arg("tol") = kDefaultSingularTolerance);
    m.def("one_norm_closed_form", &one_norm_closed_form);
    m.def("t_overhead", &t_overhead);
    m.def("shot_bound", &shot_bound, py::arg("epsilon"), py::arg("nu"), py::arg("delta"), py::arg("op_norm") = 1.0);
    m.def("variance_bound", &variance_bound, py::arg("epsilon"), py::arg("nu"), py::arg("op_norm") = 1.0);

    m.def("scan_ab", [](double epsilon, size_t grid) {
        AbScan s = scan_ab(epsilon, grid);
        py::array_t<double> norms({grid, grid});
        auto v = norms.mutable_unchecked<2>();
        for (size_t i = 0; i < grid; ++i) {
            for (size_t j = 0; j < grid; ++j) {
                const auto &cell = s.cells[i * grid + j];
                v(i, j) = cell.one_norm ? *cell.one_norm : std::numeric_limits<double>::quiet_NaN();
            }
        }
        return py::make_tuple(norms, s.cell_width,
                              py::make_tuple(s.global_minimum.a, s.global_minimum.b, *s.global_minimum.one_norm));
    }, py::arg("epsilon"), py::arg("grid") = 200, "||gamma||_1 over a cell-centred (A, B) grid (rows are A).");

    py::class_<CircuitSpec>(m, "Circuit")
        .def_readonly("n_qubits", &CircuitSpec::n_qubits)
        .def_property_readonly("nu", &CircuitSpec::nu)
        .def("__str__", [](const CircuitSpec &c) { return dump_circuit(c); });

    m.def("trotter_circuit", &trotter, py::arg("n_qubits"), py::arg("steps"), py::arg("time") = 1.0,
          py::arg("h") = 1.0, py::arg("j") = 1.0, py::arg("error") = "none", py::arg("epsilon") = 0.0,
          py::arg("direction") = py::none(), py::arg("policy") = "mix",
          "Compiled Trotter Ising circuit with an error model and mitigation policy attached.");

    m.def("estimate", [](const CircuitSpec &c, const PauliString &o, size_t shots, size_t s, uint64_t seed,
                         size_t threads) {
        EstimatorResult r;
        {
            py::gil_scoped_release release;
            r = estimate(c, o, EstimateOptions{shots, s, seed, threads});
        }
        return result_dict(r);
    }, py::arg("circuit"), py::arg("observable"), py::arg("shots") = 100000, py::arg("s") = 100,
          py::arg("seed") = 0, py::arg("threads") = 1);
    m.def("estimate_unmitigated", [](const CircuitSpec &c, const PauliString &o, size_t shots, size_t s,
                                     uint64_t seed) {
        return result_dict(estimate_unmitigated(c, o, EstimateOptions{shots, s, seed, 1}));
    }, py::arg("circuit"), py::arg("observable"), py::arg("shots") = 100000, py::arg("s") = 100, py::arg("seed") = 0);
    m.def("exact_ideal_expectation", &exact_ideal_expectation);
    m.def("exact_noisy_expectation", &exact_noisy_expectation);
    m.def("exact_mixture_expectation", [](const CircuitSpec &c, const PauliString &o) {
        auto e = oracle::exact_mixture_expectation(c, o);
        return py::make_tuple(e.enumerated, e.density_matrix);
    });

    m.def("run_config", [](const std::string &json_text, std::optional<std::string> output_dir) {
        ExperimentConfig c = parse_config(json_text);
        if (output_dir) c.output_dir = *output_dir;
        RunSummary s;
        {
            py::gil_scoped_release release;
            s = run(c);
        }
        return s.output_dir;
    }, py::arg("config_json"), py::arg("output_dir") = py::none(),
          "Runs an experiment config (JSON text); returns the output directory.");
}
