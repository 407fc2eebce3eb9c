#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "afm/diagnostics.hpp"
#include "afm/dgp.hpp"
#include "afm/error.hpp"
#include "afm/moments.hpp"
#include "afm/pca.hpp"
#include "afm/spectra.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Normalized principal components for approximate factor models.";

    py::register_exception<afm::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<afm::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<afm::DegeneracyError>(m, "DegeneracyError", PyExc_ArithmeticError);
    py::register_exception<afm::NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<afm::ModelConfig>(m, "ModelConfig")
        .def(py::init<>())
        .def_static("canonical", &afm::ModelConfig::canonical, py::arg("seed") = afm::kDefaultSeed)
        .def_readwrite("r", &afm::ModelConfig::r)
        .def_readwrite("n_max", &afm::ModelConfig::n_max)
        .def_readwrite("loading_half_widths", &afm::ModelConfig::loading_half_widths)
        .def_readwrite("idio_rho", &afm::ModelConfig::idio_rho)
        .def_readwrite("idio_sigma", &afm::ModelConfig::idio_sigma)
        .def_readwrite("seed", &afm::ModelConfig::seed)
        .def_readwrite("loading_rotation", &afm::ModelConfig::loading_rotation)
        .def("validate", &afm::ModelConfig::validate)
        .def("limit_loadings_gram", &afm::ModelConfig::limit_loadings_gram);

    py::class_<afm::SyntheticPanel>(m, "SyntheticPanel")
        .def_readonly("loadings", &afm::SyntheticPanel::loadings)
        .def_readonly("factors", &afm::SyntheticPanel::factors)
        .def_readonly("idio", &afm::SyntheticPanel::idio)
        .def_readonly("observations", &afm::SyntheticPanel::observations)
        .def_readonly("replicate", &afm::SyntheticPanel::replicate);

    m.def("draw_loadings", &afm::draw_loadings, py::arg("config"), py::arg("n"));
    m.def("idio_covariance", &afm::idio_covariance, py::arg("config"), py::arg("n"));
    m.def("simulate_panel", &afm::simulate_panel, py::arg("config"), py::arg("n"), py::arg("T"),
          py::arg("replicate") = 0);

    m.def("sample_covariance", &afm::sample_covariance, py::arg("data"));
    m.def(
        "population_covariances",
        [](const Eigen::MatrixXd& loadings, const Eigen::MatrixXd& gamma_e) {
            const auto pair = afm::population_covariances(loadings, gamma_e);
            return py::make_tuple(pair.gamma_y, pair.gamma_c);
        },
        py::arg("loadings"), py::arg("gamma_e"), "Returns (gamma_y, gamma_c).");

    py::class_<afm::EigenSystem>(m, "EigenSystem")
        .def_readonly("values", &afm::EigenSystem::values)
        .def_readonly("vectors", &afm::EigenSystem::vectors)
        .def_readonly("gap", &afm::EigenSystem::gap)
        .def_readonly("degenerate", &afm::EigenSystem::degenerate);

    m.def("top_r_eigs", &afm::top_r_eigs, py::arg("a"), py::arg("r"));
    m.def("fix_signs", &afm::fix_signs, py::arg("system"));
    m.def("npc_coefficients", &afm::npc_coefficients, py::arg("eigen"));
    m.def("normalized_pcs", &afm::normalized_pcs, py::arg("eigen"), py::arg("data"));
    m.def("pc_loadings", &afm::pc_loadings, py::arg("eigen"));

    py::class_<afm::FactorEstimate>(m, "FactorEstimate")
        .def_readonly("factors", &afm::FactorEstimate::factors)
        .def_readonly("loadings", &afm::FactorEstimate::loadings)
        .def_readonly("eigen", &afm::FactorEstimate::eigen);

    py::class_<afm::LimitObjects>(m, "LimitObjects")
        .def_readonly("p_lambda", &afm::LimitObjects::p_lambda)
        .def_readonly("d_lambda", &afm::LimitObjects::d_lambda)
        .def_readonly("f_infinity", &afm::LimitObjects::f_infinity)
        .def_readonly("lambda_infinity", &afm::LimitObjects::lambda_infinity);

    m.def("estimate_from_panel", &afm::estimate_from_panel, py::arg("panel"), py::arg("r"));
    m.def("limit_objects", &afm::limit_objects, py::arg("config"), py::arg("loadings"), py::arg("factors"));
    m.def("rotation_h", &afm::rotation_h, py::arg("estimated"), py::arg("true_factors"));

    m.def(
        "fit_loglog_slope",
        [](const std::vector<std::pair<double, double>>& points) {
            const auto fit = afm::fit_loglog_slope(points);
            return py::make_tuple(fit.slope, fit.standard_error);
        },
        py::arg("points"), "Returns (slope, stderr).");

    m.def("suite_names", &afm::suite_names);
    m.def(
        "run_suite",
        [](const std::string& suite, const afm::ModelConfig& config, const std::vector<afm::Index>& n_values,
           int replications) {
            afm::SuiteSettings settings;
            settings.config = config;
            settings.n_values = n_values;
            settings.replications = replications;
            const afm::RateReport report = afm::run_suite(settings, suite);
            py::list rows;
            for (const auto& row : report.rows) {
                rows.append(py::dict(py::arg("metric") = row.metric, py::arg("n") = row.n, py::arg("T") = row.T,
                                     py::arg("rms") = row.rms, py::arg("mse") = row.mse));
            }
            py::list verdicts;
            for (const auto& v : report.verdicts) {
                verdicts.append(py::dict(py::arg("metric") = v.metric, py::arg("slope") = v.slope,
                                         py::arg("stderr") = v.slope_stderr, py::arg("passed") = v.pass,
                                         py::arg("detail") = v.detail));
            }
            return py::make_tuple(rows, verdicts);
        },
        py::arg("suite"), py::arg("config"), py::arg("n_values"), py::arg("replications") = 32,
        "Runs a named suite on an n grid; returns (rows, verdicts) as lists of dicts.");
}
