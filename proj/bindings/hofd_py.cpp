#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hofd/errors.hpp"
#include "hofd/hogs.hpp"
#include "hofd/indices.hpp"
#include "hofd/models.hpp"
#include "hofd/pipeline.hpp"
#include "hofd/regression.hpp"
#include "hofd/subsets.hpp"
#include "hofd/types.hpp"

namespace py = pybind11;
using namespace hofd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sensitivity analysis for dependent inputs: hierarchically "
              "orthogonal basis construction, sparse surrogate fitting, and "
              "generalized variance-share estimation.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<Sample>(m, "Sample")
        .def(py::init<>())
        .def_readwrite("X", &Sample::X)
        .def_readwrite("y", &Sample::y)
        .def_readwrite("has_response", &Sample::has_response)
        .def_readonly("warnings", &Sample::warnings)
        .def_property_readonly("n", &Sample::n)
        .def_property_readonly("p", &Sample::p)
        .def("validate", &Sample::validate);

    py::class_<InputModel>(m, "InputModel")
        .def_property_readonly("dimension", &InputModel::dimension)
        .def("sample", &InputModel::sample, py::arg("n"), py::arg("seed"));

    m.def("toy_input_model", &toy_input_model,
          "Three correlated Gaussian inputs feeding a cubic polynomial with "
          "a product interaction.");
    m.def("toy_response", &toy_response, py::arg("X"));
    m.def("vessel_input_model", &vessel_input_model,
          "Eight-input mechanical test case with rank-correlated geometry, "
          "mixture materials, and a Gaussian load.");
    m.def("vessel_response", &vessel_response, py::arg("X"));
    m.def("input_model_by_name", &input_model_by_name, py::arg("name"));
    m.def("model_response", &model_response, py::arg("name"), py::arg("X"));

    py::class_<SubsetIndex>(m, "SubsetIndex")
        .def_readonly("vars", &SubsetIndex::vars)
        .def_property_readonly("order", &SubsetIndex::order)
        .def("label", &SubsetIndex::label)
        .def("__repr__", [](const SubsetIndex& s) { return "{" + s.label() + "}"; });

    py::class_<HogsConfig>(m, "HogsConfig")
        .def(py::init<>())
        .def_readwrite("family", &HogsConfig::family)
        .def_readwrite("levels", &HogsConfig::levels)
        .def_readwrite("max_order", &HogsConfig::max_order)
        .def_readwrite("spline_degree", &HogsConfig::spline_degree);

    py::class_<HofdBasis>(m, "HofdBasis")
        .def_readonly("subsets", &HofdBasis::subsets)
        .def_readonly("sample_size", &HofdBasis::sample_size)
        .def_property_readonly("total_functions", &HofdBasis::total_functions)
        .def("block_offsets", &HofdBasis::block_offsets)
        .def("values_matrix", &HofdBasis::values_matrix)
        .def("column_labels", &HofdBasis::column_labels);

    m.def("build_hogs_basis", &build_hogs_basis, py::arg("X"), py::arg("config"),
          "Build the hierarchical basis on the given inputs; every function "
          "is empirically orthogonal to the constant and to every function "
          "of every strict subset of its variables.");
    m.def("evaluate_basis", &evaluate_basis, py::arg("basis"), py::arg("X"));
    m.def("check_hierarchical_orthogonality",
          py::overload_cast<const HofdBasis&>(&check_hierarchical_orthogonality),
          py::arg("basis"));
    m.def("check_hierarchical_orthogonality",
          py::overload_cast<const HofdBasis&, const Eigen::MatrixXd&>(
              &check_hierarchical_orthogonality),
          py::arg("basis"), py::arg("X"));

    py::class_<GramMatrix>(m, "GramMatrix")
        .def_readonly("G", &GramMatrix::G)
        .def_readonly("rcond", &GramMatrix::rcond)
        .def_readonly("ill_conditioned", &GramMatrix::ill_conditioned);
    m.def("gram_matrix", &gram_matrix, py::arg("design"),
          py::arg("require_invertible") = false);

    py::class_<DesignMatrix>(m, "DesignMatrix")
        .def_readonly("Phi", &DesignMatrix::Phi)
        .def_readonly("y", &DesignMatrix::y)
        .def_readonly("y_mean", &DesignMatrix::y_mean)
        .def_readonly("labels", &DesignMatrix::labels)
        .def_readonly("offsets", &DesignMatrix::offsets)
        .def_readonly("sizes", &DesignMatrix::sizes)
        .def_property_readonly("n", &DesignMatrix::n)
        .def_property_readonly("m", &DesignMatrix::m);

    m.def("assemble_design", &assemble_design, py::arg("basis"), py::arg("sample"));

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("method", &FitConfig::method)
        .def_readwrite("foba_nu", &FitConfig::foba_nu)
        .def_readwrite("foba_epsilon", &FitConfig::foba_epsilon)
        .def_readwrite("foba_sigma2", &FitConfig::foba_sigma2)
        .def_readwrite("foba_max_steps", &FitConfig::foba_max_steps)
        .def_readwrite("lars_max_steps", &FitConfig::lars_max_steps)
        .def_readwrite("cv_folds", &FitConfig::cv_folds)
        .def_readwrite("cv_seed", &FitConfig::cv_seed)
        .def_readwrite("ridge_lambda", &FitConfig::ridge_lambda)
        .def("validate", &FitConfig::validate);

    py::class_<FitTraceEvent>(m, "FitTraceEvent")
        .def_readonly("action", &FitTraceEvent::action)
        .def_readonly("column", &FitTraceEvent::column)
        .def_readonly("delta", &FitTraceEvent::delta)
        .def_readonly("loss", &FitTraceEvent::loss)
        .def_readonly("support_size", &FitTraceEvent::support_size);

    py::class_<LarsBreakpoint>(m, "LarsBreakpoint")
        .def_readonly("lambda_", &LarsBreakpoint::lambda)
        .def_readonly("beta", &LarsBreakpoint::beta)
        .def_readonly("active", &LarsBreakpoint::active)
        .def_readonly("dropped", &LarsBreakpoint::dropped);

    py::class_<CoefficientVector>(m, "CoefficientVector")
        .def_readonly("beta", &CoefficientVector::beta)
        .def_readonly("method", &CoefficientVector::method)
        .def_readonly("support", &CoefficientVector::support)
        .def_readonly("residual_norm2", &CoefficientVector::residual_norm2)
        .def_readonly("sigma2_hat", &CoefficientVector::sigma2_hat)
        .def_readonly("epsilon", &CoefficientVector::epsilon)
        .def_readonly("lambda_", &CoefficientVector::lambda)
        .def_readonly("trace", &CoefficientVector::trace)
        .def_readonly("path", &CoefficientVector::path)
        .def_readonly("path_truncated", &CoefficientVector::path_truncated)
        .def_readonly("cv_lambda_grid", &CoefficientVector::cv_lambda_grid)
        .def_readonly("cv_mse", &CoefficientVector::cv_mse);

    m.def("fit", &fit, py::arg("design"), py::arg("config"),
          "Dispatch on config.method: ols, foba, lars, or ridge.");
    m.def("fit_ols", &fit_ols, py::arg("design"));
    m.def("fit_foba", &fit_foba, py::arg("design"), py::arg("config"));
    m.def("fit_lars", &fit_lars, py::arg("design"), py::arg("config"));
    m.def("fit_ridge", &fit_ridge, py::arg("design"), py::arg("lambda_"));

    py::class_<ComponentSet>(m, "ComponentSet")
        .def_readonly("labels", &ComponentSet::labels)
        .def_readonly("values", &ComponentSet::values)
        .def_readonly("y", &ComponentSet::y);

    m.def("reconstruct_components", &reconstruct_components, py::arg("design"),
          py::arg("coef"));

    py::class_<IndexEntry>(m, "IndexEntry")
        .def_readonly("label", &IndexEntry::label)
        .def_readonly("index", &IndexEntry::index)
        .def_readonly("var_part", &IndexEntry::var_part)
        .def_readonly("cov_part", &IndexEntry::cov_part)
        .def("__repr__", [](const IndexEntry& e) {
            return "IndexEntry(" + e.label + "=" + std::to_string(e.index) + ")";
        });

    py::class_<SensitivityReport>(m, "SensitivityReport")
        .def_readonly("entries", &SensitivityReport::entries)
        .def_readonly("total_variance", &SensitivityReport::total_variance)
        .def_readonly("sum", &SensitivityReport::sum)
        .def_readonly("component_cov", &SensitivityReport::component_cov)
        .def_readonly("cov_labels", &SensitivityReport::cov_labels)
        .def_readonly("n", &SensitivityReport::n)
        .def_readonly("method", &SensitivityReport::method)
        .def_readonly("seed", &SensitivityReport::seed)
        .def("as_dict", [](const SensitivityReport& r) {
            py::dict d;
            for (const auto& e : r.entries) d[py::str(e.label)] = e.index;
            return d;
        });

    m.def("estimate_indices", &estimate_indices, py::arg("components"),
          "Variance shares of the fitted components; the residual entry "
          "closes the sum to one exactly.");

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("model", &RunConfig::model)
        .def_readwrite("sample_path", &RunConfig::sample_path)
        .def_readwrite("response", &RunConfig::response)
        .def_readwrite("n", &RunConfig::n)
        .def_readwrite("basis", &RunConfig::basis)
        .def_readwrite("fit", &RunConfig::fit)
        .def_readwrite("replicates", &RunConfig::replicates)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("jobs", &RunConfig::jobs)
        .def_readwrite("out_dir", &RunConfig::out_dir)
        .def("validate", &RunConfig::validate);

    m.def("load_run_config", &load_run_config, py::arg("path"));

    py::class_<PipelineResult>(m, "PipelineResult")
        .def_readonly("sample", &PipelineResult::sample)
        .def_readonly("basis", &PipelineResult::basis)
        .def_readonly("design", &PipelineResult::design)
        .def_readonly("gram", &PipelineResult::gram)
        .def_readonly("coef", &PipelineResult::coef)
        .def_readonly("report", &PipelineResult::report);

    m.def("run_pipeline", &run_pipeline, py::arg("config"), py::arg("seed"),
          "Draw or load the sample, build the basis, fit, and estimate the "
          "variance shares in one call.");
    m.def("make_sample", &make_sample, py::arg("config"), py::arg("seed"));
}
