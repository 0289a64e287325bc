#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsn/bounds.hpp"
#include "qsn/fisher.hpp"
#include "qsn/network.hpp"
#include "qsn/probes.hpp"
#include "qsn/search.hpp"

namespace py = pybind11;
using namespace qsn;

PYBIND11_MODULE(qsn, m) {
  m.doc() = "Precision bounds and probe-state catalog for networks of quantum sensors";

  py::register_exception<SchemaError>(m, "SchemaError");
  py::register_exception<EstimationError>(m, "EstimationError");
  py::register_exception<CapacityError>(m, "CapacityError");

  py::class_<SensorSpace>(m, "SensorSpace")
      .def(py::init<std::vector<Index>>(), py::arg("sector_dims"))
      .def_static("bosonic_mode", &SensorSpace::bosonic_mode, py::arg("n_max"))
      .def_static("qubit_ensemble", &SensorSpace::qubit_ensemble, py::arg("n_atoms"))
      .def_static("qubit_ensemble_with_vacuum", &SensorSpace::qubit_ensemble_with_vacuum,
                  py::arg("n_atoms"))
      .def("dim", &SensorSpace::dim)
      .def("n_max", &SensorSpace::n_max)
      .def("sector_dim", &SensorSpace::sector_dim, py::arg("n"))
      .def("sector_of", &SensorSpace::sector_of, py::arg("basis_index"));

  py::class_<GeneratorSpec>(m, "GeneratorSpec")
      .def_static("linear", &GeneratorSpec::linear, py::arg("delta"), py::arg("twice_spin"))
      .def_static("number_operator", &GeneratorSpec::number_operator)
      .def_static("spin_z", &GeneratorSpec::spin_z)
      .def_static("dense", &GeneratorSpec::dense, py::arg("h"))
      .def("is_linear", &GeneratorSpec::is_linear)
      .def("lambda_min", &GeneratorSpec::lambda_min)
      .def("lambda_max", &GeneratorSpec::lambda_max);

  py::class_<NetworkLayout>(m, "NetworkLayout")
      .def(py::init<std::vector<SensorSpace>, std::vector<std::pair<int, GeneratorSpec>>>(),
           py::arg("sensors"), py::arg("params"))
      .def("dim", &NetworkLayout::dim)
      .def("num_sensors", &NetworkLayout::num_sensors)
      .def("num_params", &NetworkLayout::num_params)
      .def("param_sensor", &NetworkLayout::param_sensor, py::arg("k"))
      .def("ancilla_indices", &NetworkLayout::ancilla_indices)
      .def("all_params_linear", &NetworkLayout::all_params_linear);

  py::class_<NetworkState>(m, "NetworkState")
      .def(py::init<NetworkLayout, Vec>(), py::arg("layout"), py::arg("amplitudes"))
      .def("amplitudes", &NetworkState::amplitudes)
      .def("layout", &NetworkState::layout);

  m.def("ghz", &ghz, py::arg("layout"), py::arg("n_per_sensor"));
  m.def("weighted_ghz", &weighted_ghz, py::arg("layout"), py::arg("weights"));
  m.def("gns", &gns, py::arg("layout"), py::arg("n_particles"), py::arg("gamma") = 1.0);
  m.def("uns", &uns, py::arg("layout"), py::arg("n_particles"));
  m.def("local_superposition", &local_superposition, py::arg("layout"), py::arg("weights"));
  m.def("separable_surrogate", &separable_surrogate, py::arg("state"));

  m.def("evolve", &evolve, py::arg("state"), py::arg("phi"));
  m.def("resource_expectation", &resource_expectation, py::arg("state"));
  m.def("max_particles_in_support", &max_particles_in_support, py::arg("state"),
        py::arg("tol") = 1e-12);
  m.def("sensor_marginal", &sensor_marginal, py::arg("state"), py::arg("sensor"));

  py::class_<Qfim>(m, "Qfim")
      .def(py::init<RMat, std::vector<std::string>>(), py::arg("matrix"),
           py::arg("labels") = std::vector<std::string>{})
      .def("matrix", &Qfim::matrix)
      .def("labels", &Qfim::labels)
      .def("dim", &Qfim::dim)
      .def("eigen_floor", &Qfim::eigen_floor)
      .def("eigen_ceil", &Qfim::eigen_ceil)
      .def("invertible", &Qfim::invertible);

  py::class_<LinearReparam>(m, "LinearReparam")
      .def(py::init<RMat, bool>(), py::arg("matrix"), py::arg("row_normalized") = false)
      .def("matrix", &LinearReparam::matrix);

  py::class_<Weighting>(m, "Weighting")
      .def(py::init<RVec>(), py::arg("diag"))
      .def_static("uniform", &Weighting::uniform, py::arg("d"))
      .def_static("single", &Weighting::single, py::arg("d"), py::arg("k"))
      .def("diag", &Weighting::diag)
      .def("dim", &Weighting::dim);

  py::class_<ReducedProblem>(m, "ReducedProblem")
      .def_readonly("kept_indices", &ReducedProblem::kept_indices)
      .def_readonly("reduced_qfim", &ReducedProblem::reduced_qfim)
      .def_readonly("reduced_weights", &ReducedProblem::reduced_weights)
      .def_readonly("discarded_indices", &ReducedProblem::discarded_indices)
      .def_readonly("estimation_failure", &ReducedProblem::estimation_failure);

  m.def("qfim_pure_commuting", &qfim_pure_commuting, py::arg("state"));
  m.def("qfim_pure_general", &qfim_pure_general, py::arg("state"), py::arg("phi"));
  m.def("sld_pure", &sld_pure, py::arg("state"), py::arg("phi"), py::arg("k"));
  m.def("saturation_check", &saturation_check, py::arg("state"), py::arg("phi"));
  m.def("classical_fim", &classical_fim, py::arg("state"), py::arg("phi"), py::arg("povm"));
  m.def("reparam", &reparam, py::arg("qfim"), py::arg("m"));
  m.def("orthonormal_from_first_row", &orthonormal_from_first_row, py::arg("v"));
  m.def("reduce", &reduce, py::arg("qfim"), py::arg("weighting"));
  m.def("weighted_crb", &weighted_crb, py::arg("reduced"), py::arg("mu"));
  m.def("inv_diag_lower_bound", &inv_diag_lower_bound, py::arg("a"));
  m.def("block_inv_lower_bound", &block_inv_lower_bound, py::arg("a"), py::arg("partition"));

  py::class_<SymmetricQfimInverse>(m, "SymmetricQfimInverse")
      .def_readonly("inverse", &SymmetricQfimInverse::inverse)
      .def_readonly("g", &SymmetricQfimInverse::g);
  m.def("symmetric_qfim_inverse", &symmetric_qfim_inverse, py::arg("v"), py::arg("c"),
        py::arg("d"));

  m.def("ghz_sum", &ghz_sum);
  m.def("local_sum", &local_sum);
  m.def("weighted_ghz_bound", &weighted_ghz_bound);
  m.def("local_weighted", &local_weighted);
  m.def("local_optimal", &local_optimal);
  m.def("local_optimal_allocation", &local_optimal_allocation, py::arg("v"));
  m.def("gns_bound", &gns_bound);
  m.def("noon_individual", &noon_individual);
  m.def("imaging_symmetric", &imaging_symmetric);
  m.def("imaging_unknown_reference", &imaging_unknown_reference);
  m.def("two_qubit_nonorthogonal", &two_qubit_nonorthogonal);
  m.def("two_qubit_x_min", &two_qubit_x_min);
  m.def("propagate_variance", &propagate_variance);

  py::class_<SubspaceSpec>(m, "SubspaceSpec")
      .def_static("total_at_most", &SubspaceSpec::total_at_most, py::arg("layout"),
                  py::arg("n_max"))
      .def_static("per_sensor_at_most", &SubspaceSpec::per_sensor_at_most, py::arg("layout"),
                  py::arg("n_max"))
      .def_static("fixed_per_sensor", &SubspaceSpec::fixed_per_sensor, py::arg("layout"),
                  py::arg("per_sensor"))
      .def("basis", &SubspaceSpec::basis)
      .def("dim", &SubspaceSpec::dim)
      .def("max_total_particles", &SubspaceSpec::max_total_particles);

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("best_value", &SearchResult::best_value)
      .def_readonly("best_state", &SearchResult::best_state)
      .def_readonly("evaluations", &SearchResult::evaluations)
      .def_readonly("seed", &SearchResult::seed)
      .def_readonly("certificate", &SearchResult::certificate)
      .def_readonly("reference", &SearchResult::reference)
      .def_readonly("reference_beaten", &SearchResult::reference_beaten);

  m.def("max_variance", &max_variance, py::arg("subspace"), py::arg("v"));
  m.def(
      "min_crb_random_single",
      [](const SubspaceSpec& sub, const RVec& v, long count, std::uint64_t seed,
         std::optional<double> reference) {
        return min_crb_search(sub, SingleFunction{v}, RandomHaar{count, seed}, reference);
      },
      py::arg("subspace"), py::arg("v"), py::arg("count"), py::arg("seed"),
      py::arg("reference") = std::nullopt);
  m.def(
      "min_crb_random_weighted",
      [](const SubspaceSpec& sub, const RVec& weights, long count, std::uint64_t seed,
         std::optional<double> reference) {
        return min_crb_search(sub, EstimatePhi{Weighting(weights)}, RandomHaar{count, seed},
                              reference);
      },
      py::arg("subspace"), py::arg("weights"), py::arg("count"), py::arg("seed"),
      py::arg("reference") = std::nullopt);
  m.def(
      "min_crb_grid_single",
      [](const SubspaceSpec& sub, const RVec& v, double step, std::optional<double> reference) {
        return min_crb_search(sub, SingleFunction{v}, ExhaustiveRealGrid{step}, reference);
      },
      py::arg("subspace"), py::arg("v"), py::arg("step"), py::arg("reference") = std::nullopt);
  m.def("allocation_search", &allocation_search, py::arg("v"), py::arg("n_max"), py::arg("step"));
  m.def("nonorthogonal_scan", &nonorthogonal_scan, py::arg("alpha"), py::arg("beta"),
        py::arg("step"));
}
