#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "drtune/attack.hpp"
#include "drtune/bound.hpp"
#include "drtune/error.hpp"
#include "drtune/lti.hpp"
#include "drtune/moments.hpp"
#include "drtune/noise.hpp"
#include "drtune/reach.hpp"
#include "drtune/simulate.hpp"
#include "drtune/tuning.hpp"

namespace py = pybind11;
using namespace drtune;

PYBIND11_MODULE(_drtune, m) {
  m.doc() = "Moment-based distributionally robust detector tuning";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_AssertionError);

  py::class_<MomentSequence>(m, "MomentSequence")
      .def(py::init<std::vector<double>>(), py::arg("values"))
      .def_property_readonly("order", &MomentSequence::order)
      .def_property_readonly("values", &MomentSequence::values)
      .def("mean", &MomentSequence::mean)
      .def("truncated", &MomentSequence::truncated)
      .def("scaled", &MomentSequence::scaled)
      .def("__getitem__", [](const MomentSequence& s, int i) {
        if (i < 0 || i > s.order()) throw py::index_error();
        return s[i];
      })
      .def("__repr__", [](const MomentSequence& s) { return "MomentSequence(" + s.to_csv_row() + ")"; });

  m.def("is_feasible", &is_feasible, py::arg("moments"), py::arg("tol") = 1e-9);
  m.def("chi_squared_moments", &chi_squared_moments, py::arg("dof"), py::arg("k"));
  m.def("estimate_moments", [](const std::vector<double>& xs, int k) { return estimate_moments(xs, k); },
        py::arg("samples"), py::arg("k"));

  m.def("markov_bound", &markov_bound, py::arg("moments"), py::arg("alpha"));
  m.def("chebyshev_bound", &chebyshev_bound, py::arg("moments"), py::arg("alpha"));
  m.def("worst_case_probability",
        [](const MomentSequence& mom, double alpha, double tol) {
          const SdpSolution s = worst_case_probability(mom, alpha, tol);
          return py::make_tuple(s.objective, s.y.coeffs, to_string(s.status));
        },
        py::arg("moments"), py::arg("alpha"), py::arg("tol") = 1e-9,
        "Returns (bound, polynomial coefficients, solver status).");
  m.def("oracle_worst_case", &oracle_worst_case, py::arg("moments"), py::arg("alpha"), py::arg("grid") = 2000);

  py::enum_<TuningMethod>(m, "TuningMethod")
      .value("ChiSquared", TuningMethod::ChiSquared)
      .value("DrChebyshevMultivariate", TuningMethod::DrChebyshevMultivariate)
      .value("ClosedFormK1", TuningMethod::ClosedFormK1)
      .value("ClosedFormK2", TuningMethod::ClosedFormK2)
      .value("SdpBisection", TuningMethod::SdpBisection);

  py::class_<ThresholdResult>(m, "ThresholdResult")
      .def_readonly("alpha", &ThresholdResult::alpha)
      .def_readonly("method", &ThresholdResult::method)
      .def_readonly("k", &ThresholdResult::k)
      .def_readonly("target_rate", &ThresholdResult::target_rate)
      .def_readonly("achieved_worst_case", &ThresholdResult::achieved_worst_case)
      .def_readonly("sdp_solves", &ThresholdResult::sdp_solves)
      .def("__repr__", [](const ThresholdResult& r) { return "ThresholdResult(" + r.to_csv_row() + ")"; });

  m.def("chi_squared_threshold", &chi_squared_threshold, py::arg("dof"), py::arg("rate"));
  m.def("closed_form_threshold", &closed_form_threshold, py::arg("moments"), py::arg("rate"), py::arg("k"));
  m.def("tune_threshold", &tune_threshold, py::arg("moments"), py::arg("rate"), py::arg("k"),
        py::arg("epsilon") = 1e-4);

  m.def("solve_dare",
        [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& C, const Eigen::MatrixXd& Sw, const Eigen::MatrixXd& Sv) {
          const DareSolution d = solve_dare(A, C, Sw, Sv);
          return py::make_tuple(d.P, d.L);
        },
        py::arg("A"), py::arg("C"), py::arg("sigma_w"), py::arg("sigma_v"), "Returns (P, L).");

  py::class_<LtiSystem>(m, "LtiSystem")
      .def(py::init(&LtiSystem::create), py::arg("A"), py::arg("B"), py::arg("C"), py::arg("K"), py::arg("sigma_w"),
           py::arg("sigma_v"))
      .def_property_readonly("A", &LtiSystem::A)
      .def_property_readonly("C", &LtiSystem::C)
      .def_property_readonly("P", &LtiSystem::P)
      .def_property_readonly("L", &LtiSystem::L)
      .def_property_readonly("sigma_r", &LtiSystem::sigma_r)
      .def("closed_loop", &LtiSystem::closed_loop);

  py::enum_<NoiseFamily>(m, "NoiseFamily")
      .value("Gaussian", NoiseFamily::Gaussian)
      .value("MultivariateLaplacian", NoiseFamily::MultivariateLaplacian);

  py::class_<NoiseModel>(m, "NoiseModel")
      .def(py::init([](NoiseFamily f, Eigen::MatrixXd cov, std::uint64_t seed) { return NoiseModel{f, std::move(cov), seed}; }),
           py::arg("family"), py::arg("covariance"), py::arg("seed") = 0)
      .def_readwrite("family", &NoiseModel::family)
      .def_readwrite("covariance", &NoiseModel::covariance)
      .def_readwrite("seed", &NoiseModel::seed);

  py::class_<AttackPolicy>(m, "AttackPolicy")
      .def(py::init([](double alpha) {
             AttackPolicy p;
             p.alpha = alpha;
             return p;
           }),
           py::arg("alpha"))
      .def_readwrite("alpha", &AttackPolicy::alpha);

  m.def("zero_alarm_attack", &zero_alarm_attack, py::arg("sys"), py::arg("alpha"), py::arg("e"), py::arg("v"),
        py::arg("delta_bar"));

  m.def("simulate",
        [](const LtiSystem& sys, const NoiseModel& w, const NoiseModel& v, long T, std::optional<AttackPolicy> attack) {
          ResidualTrace tr = simulate(sys, w, v, T, attack);
          return py::make_tuple(tr.residuals, tr.q_values);
        },
        py::arg("sys"), py::arg("noise_w"), py::arg("noise_v"), py::arg("T"), py::arg("attack") = py::none(),
        "Returns (residuals p x T, q values).");
  m.def("empirical_false_alarm_rate",
        [](const std::vector<double>& q, double alpha) {
          ResidualTrace tr;
          tr.q_values = q;
          return empirical_false_alarm_rate(tr, alpha);
        },
        py::arg("q_values"), py::arg("alpha"));

  py::class_<ReachBound>(m, "ReachBound")
      .def_readonly("horizon", &ReachBound::horizon)
      .def_readonly("alpha", &ReachBound::alpha)
      .def_readonly("w_bar", &ReachBound::w_bar)
      .def_readonly("area", &ReachBound::area)
      .def_readonly("truncation_bound", &ReachBound::truncation_bound)
      .def("support", &ReachBound::support)
      .def_property_readonly("points", [](const ReachBound& b) {
        Eigen::MatrixXd pts(b.boundary.size(), b.boundary.empty() ? 0 : b.boundary.front().point.size());
        for (std::size_t i = 0; i < b.boundary.size(); ++i) pts.row(static_cast<Eigen::Index>(i)) = b.boundary[i].point.transpose();
        return pts;
      });

  m.def("noise_threshold", &noise_threshold, py::arg("n"), py::arg("rate"));
  m.def("reach_bound", &reach_bound, py::arg("sys"), py::arg("w_bar"), py::arg("alpha"), py::arg("t"),
        py::arg("n_dirs"), py::arg("direction_seed") = 0);
}
