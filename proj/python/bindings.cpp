// Thin Python surface: run a config, inspect matrices and noise spectra.

#include "spde/config.hpp"
#include "spde/operators.hpp"
#include "spde/noise.hpp"
#include "spde/report.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

spde::ConfigFile parse_or_throw(const std::string& text) {
    spde::ParseResult parsed = spde::parse_config(text);
    if (!parsed.ok()) {
        std::string msg = "config rejected:";
        for (const auto& e : parsed.errors) msg += "\n  - " + e;
        throw py::value_error(msg);
    }
    return std::move(*parsed.config);
}

py::dict run(const std::string& text, int workers, std::optional<std::uint64_t> seed) {
    spde::ConfigFile config = parse_or_throw(text);
    if (seed) config.output.seed = *seed;
    config.run.master_seed = config.output.seed;
    spde::StudyOutcome outcome;
    {
        py::gil_scoped_release release;
        outcome = spde::run_study(config, workers);
    }
    py::list rows;
    for (const spde::ErrorRow& r : outcome.rows) rows.append(py::make_tuple(r.axis_value, r.K, r.rms_error, r.standard_error));
    py::dict out;
    out["axis_kind"] = outcome.axis_kind;
    out["rows"] = rows;
    out["fitted_slope"] = outcome.fitted_slope;
    out["expected_slope"] = spde::expected_rate(config);
    out["seed"] = config.output.seed;
    out["notes"] = outcome.notes;
    out["csv_rows"] = spde::format_csv_rows(outcome);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Tamed spectral-Galerkin solver for stochastic Allen-Cahn type equations";

    py::register_exception<spde::DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    m.def("run", &run, py::arg("config"), py::arg("workers") = 1, py::arg("seed") = py::none(),
          "Run the study described by config text; returns rows and the fitted slope.");
    m.def(
        "check_config",
        [](const std::string& text) { return spde::parse_config(text).errors; }, py::arg("config"),
        "List of problems with a config; empty when it is accepted.");
    m.def("mass_matrix", &spde::assemble_mass, py::arg("N"));
    m.def(
        "stiffness_matrix", [](int n, double nu) { return spde::assemble_stiffness(n, {1, nu}); }, py::arg("N"),
        py::arg("diffusivity") = 1.0);
    m.def(
        "eigenvalues",
        [](int n, double nu) {
            return spde::generalized_eigendecomposition(spde::assemble_mass(n), spde::assemble_stiffness(n, {1, nu}))
                .lambda;
        },
        py::arg("N"), py::arg("diffusivity") = 1.0, "Eigenvalues lambda of B h = lambda A h.");
    m.def(
        "noise_eigenvalues",
        [](int dimension, int truncation, double decay) {
            spde::QWienerSpec spec;
            spec.dimension = dimension;
            spec.truncation = truncation;
            spec.decay = decay;
            spde::validate(spec);
            return spec.eigenvalues();
        },
        py::arg("dimension") = 1, py::arg("J") = 100, py::arg("decay") = 2.0);
}
