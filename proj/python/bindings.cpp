#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include <microlam/experiment.hpp>
#include <microlam/homogenize.hpp>
#include <microlam/laminate.hpp>
#include <microlam/moment_opt.hpp>
#include <microlam/reconstruct.hpp>
#include <microlam/tensors.hpp>
#include <microlam/topopt.hpp>
#include <microlam/unitcell.hpp>

namespace py = pybind11;
using namespace microlam;

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "Optimal rank-3 laminate bounds, reconstruction, unit cell mapping and "
      "inverse homogenization for multi-load plane elasticity";

  py::class_<StressCase>(mod, "StressCase")
      .def(py::init<>())
      .def(py::init([](double s11, double s22, double s12, double weight) {
             return StressCase{s11, s22, s12, weight};
           }),
           py::arg("s11"), py::arg("s22"), py::arg("s12"),
           py::arg("weight") = 1.0)
      .def_readwrite("s11", &StressCase::s11)
      .def_readwrite("s22", &StressCase::s22)
      .def_readwrite("s12", &StressCase::s12)
      .def_readwrite("weight", &StressCase::weight)
      .def("__repr__", [](const StressCase& s) {
        std::ostringstream os;
        os << "StressCase(s11=" << s.s11 << ", s22=" << s.s22
           << ", s12=" << s.s12 << ", weight=" << s.weight << ")";
        return os.str();
      });

  py::class_<LoadSet>(mod, "LoadSet")
      .def(py::init<>())
      .def(py::init<std::vector<StressCase>>(), py::arg("cases"))
      .def("cases", &LoadSet::cases)
      .def("__len__", &LoadSet::size);

  py::class_<MaterialPair>(mod, "MaterialPair")
      .def(py::init<>())
      .def(py::init([](double e_plus, double e_minus, double nu) {
             return MaterialPair{e_plus, e_minus, nu};
           }),
           py::arg("e_plus") = 1.0, py::arg("e_minus") = 1.0e-9,
           py::arg("nu") = 0.3)
      .def_readwrite("e_plus", &MaterialPair::e_plus)
      .def_readwrite("e_minus", &MaterialPair::e_minus)
      .def_readwrite("nu", &MaterialPair::nu);

  py::class_<MomentVector>(mod, "MomentVector")
      .def(py::init<>())
      .def(py::init([](double m1, double m2, double m3, double m4) {
             return MomentVector{m1, m2, m3, m4};
           }),
           py::arg("m1"), py::arg("m2"), py::arg("m3"), py::arg("m4"))
      .def_readwrite("m1", &MomentVector::m1)
      .def_readwrite("m2", &MomentVector::m2)
      .def_readwrite("m3", &MomentVector::m3)
      .def_readwrite("m4", &MomentVector::m4)
      .def("vec", &MomentVector::vec)
      .def("__repr__", [](const MomentVector& m) {
        std::ostringstream os;
        os << "MomentVector(" << m.m1 << ", " << m.m2 << ", " << m.m3 << ", "
           << m.m4 << ")";
        return os.str();
      });

  py::class_<FeasibilityResiduals>(mod, "FeasibilityResiduals")
      .def_readonly("circle", &FeasibilityResiduals::circle)
      .def_readonly("band", &FeasibilityResiduals::band)
      .def_readonly("boundary", &FeasibilityResiduals::boundary)
      .def("feasible", &FeasibilityResiduals::feasible, py::arg("tol") = 0.0);

  mod.def("moment_feasibility", &moment_feasibility, py::arg("m"));
  mod.def("moment_matrix", &moment_matrix, py::arg("m"));
  mod.def("effective_compliance", &effective_compliance, py::arg("m"),
          py::arg("f"), py::arg("material"));
  mod.def("complementary_energy", &complementary_energy, py::arg("m"),
          py::arg("f"), py::arg("material"), py::arg("loads"),
          "Weighted complementary energy of the optimal laminate with the "
          "given moments");
  mod.def("isotropic_stiffness_voigt", &isotropic_stiffness_voigt,
          py::arg("e"), py::arg("nu"));

  py::class_<MomentSolverOptions>(mod, "MomentSolverOptions")
      .def(py::init<>())
      .def_readwrite("barrier_init", &MomentSolverOptions::barrier_init)
      .def_readwrite("barrier_shrink", &MomentSolverOptions::barrier_shrink)
      .def_readwrite("outer_iterations",
                     &MomentSolverOptions::outer_iterations)
      .def_readwrite("max_inner", &MomentSolverOptions::max_inner)
      .def_readwrite("grad_tol", &MomentSolverOptions::grad_tol);

  py::class_<MomentSolution>(mod, "MomentSolution")
      .def_readonly("m", &MomentSolution::m)
      .def_readonly("energy", &MomentSolution::energy)
      .def_readonly("kkt_residual", &MomentSolution::kkt_residual)
      .def_readonly("iterations", &MomentSolution::iterations)
      .def_readonly("converged", &MomentSolution::converged);

  mod.def("optimize_moments", &optimize_moments, py::arg("loads"),
          py::arg("f"), py::arg("material"),
          py::arg("options") = MomentSolverOptions{},
          "Energy bound: minimize the complementary energy over the feasible "
          "moment set");

  py::class_<OracleResult>(mod, "OracleResult")
      .def_readonly("m", &OracleResult::m)
      .def_readonly("energy", &OracleResult::energy)
      .def_readonly("points_evaluated", &OracleResult::points_evaluated);

  mod.def("grid_search_oracle", &grid_search_oracle, py::arg("loads"),
          py::arg("f"), py::arg("material"), py::arg("resolution"));

  py::class_<Rank3Laminate>(mod, "Rank3Laminate")
      .def(py::init<>())
      .def_readwrite("p", &Rank3Laminate::p)
      .def_readwrite("theta", &Rank3Laminate::theta)
      .def_readwrite("rank", &Rank3Laminate::rank);

  mod.def("reconstruct_laminate", &reconstruct_laminate, py::arg("m"),
          "Layer directions and weights of a rank <= 3 laminate with the "
          "given moments");
  mod.def("laminate_moments", &laminate_moments, py::arg("laminate"));
  mod.def("layer_widths", &layer_widths, py::arg("laminate"), py::arg("f"));

  py::class_<StripeFamily>(mod, "StripeFamily")
      .def_readwrite("theta", &StripeFamily::theta)
      .def_readwrite("spacing", &StripeFamily::spacing)
      .def_readwrite("ku", &StripeFamily::ku)
      .def_readwrite("kv", &StripeFamily::kv)
      .def_readwrite("width", &StripeFamily::width);

  py::class_<ParallelogramCell>(mod, "ParallelogramCell")
      .def(py::init<>())
      .def_readwrite("a1", &ParallelogramCell::a1)
      .def_readwrite("a2", &ParallelogramCell::a2)
      .def_readwrite("stripes", &ParallelogramCell::stripes)
      .def("basis", &ParallelogramCell::basis);

  mod.def("build_cell", &build_cell, py::arg("laminate"));
  mod.def("stripe_union_area", &stripe_union_area, py::arg("cell"));
  mod.def(
      "width_bisection",
      [](ParallelogramCell& cell, const Rank3Laminate& lam, double f) {
        const double s = width_bisection(cell, lam, f);
        return py::make_tuple(s, cell);
      },
      py::arg("cell"), py::arg("laminate"), py::arg("f"),
      "Returns (scale, cell) with stripe widths set so the covered area "
      "equals f");
  mod.def("rasterize_cell", &rasterize_cell, py::arg("cell"), py::arg("nx"),
          py::arg("ny"), py::arg("supersample") = 3);
  mod.def("point_is_solid", &point_is_solid, py::arg("cell"), py::arg("u"),
          py::arg("v"));

  py::class_<Homogenizer>(mod, "Homogenizer")
      .def(py::init<int, int, const Eigen::Matrix2d&, const MaterialPair&>(),
           py::arg("nx"), py::arg("ny"), py::arg("basis"), py::arg("material"))
      .def("homogenize", &Homogenizer::homogenize, py::arg("rho"),
           "Homogenized stiffness (Voigt, engineering shear) of the density "
           "field")
      .def("complementary_energy", &Homogenizer::complementary_energy,
           py::arg("loads"))
      .def("energy_gradient", &Homogenizer::energy_gradient, py::arg("loads"))
      .def("last_stiffness", &Homogenizer::last_stiffness)
      .def("element_count", &Homogenizer::element_count);

  py::class_<PeriodicFilter>(mod, "PeriodicFilter")
      .def(py::init<int, int, const Eigen::Matrix2d&, double>(),
           py::arg("nx"), py::arg("ny"), py::arg("basis"), py::arg("radius"))
      .def("apply", &PeriodicFilter::apply, py::arg("x"))
      .def("apply_transpose", &PeriodicFilter::apply_transpose, py::arg("x"))
      .def("radius", &PeriodicFilter::radius);

  mod.def("heaviside_project", py::vectorize(heaviside_project),
          py::arg("rho_bar"), py::arg("beta"));

  py::class_<TopOptConfig>(mod, "TopOptConfig")
      .def(py::init<>())
      .def_readwrite("volume_fraction", &TopOptConfig::volume_fraction)
      .def_readwrite("radius", &TopOptConfig::radius)
      .def_readwrite("max_iterations", &TopOptConfig::max_iterations)
      .def_readwrite("move_limit", &TopOptConfig::move_limit)
      .def_readwrite("beta_initial", &TopOptConfig::beta_initial)
      .def_readwrite("beta_multiplier", &TopOptConfig::beta_multiplier)
      .def_readwrite("beta_interval", &TopOptConfig::beta_interval)
      .def_readwrite("beta_max", &TopOptConfig::beta_max)
      .def_readwrite("change_tolerance", &TopOptConfig::change_tolerance)
      .def_readwrite("settle_iterations", &TopOptConfig::settle_iterations);

  py::class_<IterationRecord>(mod, "IterationRecord")
      .def_readonly("iteration", &IterationRecord::iteration)
      .def_readonly("objective", &IterationRecord::objective)
      .def_readonly("volume", &IterationRecord::volume)
      .def_readonly("change", &IterationRecord::change)
      .def_readonly("beta", &IterationRecord::beta);

  py::class_<TopOptResult>(mod, "TopOptResult")
      .def_readonly("design", &TopOptResult::design)
      .def_readonly("physical", &TopOptResult::physical)
      .def_readonly("objective", &TopOptResult::objective)
      .def_readonly("volume", &TopOptResult::volume)
      .def_readonly("stiffness", &TopOptResult::stiffness)
      .def_readonly("iterations", &TopOptResult::iterations)
      .def_readonly("converged", &TopOptResult::converged)
      .def_readonly("history", &TopOptResult::history);

  mod.def("optimize_cell", &optimize_cell, py::arg("homogenizer"),
          py::arg("filter"), py::arg("loads"), py::arg("start"),
          py::arg("config"),
          "Inverse homogenization of the unit cell under a volume bound");

  mod.def(
      "random_start",
      [](int nx, int ny, double f, std::uint64_t seed,
         const PeriodicFilter& filter) {
        std::mt19937 rng(static_cast<std::mt19937::result_type>(seed));
        return random_start(nx, ny, f, rng, filter);
      },
      py::arg("nx"), py::arg("ny"), py::arg("f"), py::arg("seed"),
      py::arg("filter"));
  mod.def("homogeneous_start", &homogeneous_start, py::arg("nx"),
          py::arg("ny"), py::arg("basis"), py::arg("f"), py::arg("radius"));

  mod.def("example_loadset_shear_uniaxial", &build_loadset_examples123,
          py::arg("chi"),
          "Two shear-type stresses weighted chi/2 each plus two uniaxial "
          "stresses weighted (1-chi)/2 each");
  mod.def("example_loadset_three_uniaxial", &build_loadset_example4,
          py::arg("chi_degrees"),
          "Three equal-weight uniaxial stresses fanned by the given angle");
}
