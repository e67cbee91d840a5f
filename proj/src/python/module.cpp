#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>

#include "sqfold/bench.hpp"
#include "sqfold/convexify.hpp"
#include "sqfold/formulation.hpp"
#include "sqfold/milp.hpp"
#include "sqfold/oracle.hpp"
#include "sqfold/refine.hpp"

namespace py = pybind11;
using namespace sqfold;

namespace {

std::optional<BlockMode> parse_mode(const std::string& mode) {
  if (mode == "d") return BlockMode::D;
  if (mode == "dplus") return BlockMode::Dplus;
  if (mode == "auto") return std::nullopt;
  throw std::invalid_argument("mode must be 'd', 'dplus' or 'auto'");
}

py::dict state_to_dict(const SolveState& st) {
  py::dict out;
  out["status"] = std::string(to_string(st.status));
  out["tau_lower"] = st.tau_lower;
  out["tau_upper"] = st.tau_upper;
  out["nu"] = st.nu;
  if (st.incumbent)
    out["x"] = *st.incumbent;
  else
    out["x"] = py::none();
  py::list iters;
  for (const auto& it : st.iterations) {
    py::dict rec;
    rec["k"] = it.k;
    rec["tau_lower"] = it.tau_lower;
    rec["tau_upper"] = it.tau_upper;
    rec["gap"] = it.gap;
    rec["refined_indices"] = it.refined;
    rec["nodes"] = it.nodes;
    rec["seconds"] = it.seconds;
    iters.append(rec);
  }
  out["iterations"] = iters;
  out["nodes"] = st.total_nodes;
  out["seconds"] = st.seconds;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "global bounds for box-constrained nonconvex QCPs via lifted "
            "disjunctive relaxations of the square function";

  py::class_<QcpInstance>(m, "Instance")
      .def_static("from_json", &parse_json, py::arg("text"))
      .def_static("from_json_file", &load_json_file, py::arg("path"))
      .def_static("from_boxqp", &parse_boxqp, py::arg("text"),
                  py::arg("negate") = false)
      .def_static("from_boxqp_file", &load_boxqp_file, py::arg("path"),
                  py::arg("negate") = false)
      .def_property_readonly("n", [](const QcpInstance& i) { return i.n; })
      .def_property_readonly("m", [](const QcpInstance& i) { return i.m; })
      .def_property_readonly("name",
                             [](const QcpInstance& i) { return i.name; })
      .def("to_json", &serialize)
      .def("objective_value",
           [](const QcpInstance& i, const std::vector<double>& x) {
             return i.objective.value(x);
           })
      .def("__repr__", [](const QcpInstance& i) {
        std::ostringstream os;
        os << "<Instance '" << i.name << "' n=" << i.n << " m=" << i.m << ">";
        return os.str();
      });

  m.def(
      "solve",
      [](const QcpInstance& inst, int T, double eps_viol, double eps_gap,
         double time_limit, long node_limit, const std::string& mode,
         bool paper_exact_diagonal) {
        RefineParams p;
        p.T = T;
        p.eps_viol = eps_viol;
        p.eps_gap = eps_gap;
        p.time_limit = time_limit;
        p.node_limit = node_limit;
        p.mode = parse_mode(mode);
        p.perturb.paper_exact_diagonal = paper_exact_diagonal;
        return state_to_dict(solve(inst, p));
      },
      py::arg("instance"), py::arg("T") = 20, py::arg("eps_viol") = 1e-5,
      py::arg("eps_gap") = 1e-4, py::arg("time_limit") = 3600.0,
      py::arg("node_limit") = 100000000L, py::arg("mode") = "auto",
      py::arg("paper_exact_diagonal") = false,
      "Run the adaptive refinement loop and return bounds, point and log.");

  m.def(
      "grid_optimum",
      [](const QcpInstance& inst, double step) {
        const GridResult r = grid_optimum(inst, step);
        py::dict out;
        out["feasible"] = r.feasible;
        if (r.feasible) {
          out["value"] = r.value;
          out["point"] = r.point;
        }
        return out;
      },
      py::arg("instance"), py::arg("step"),
      "Brute-force lattice optimum for n <= 4.");

  m.def(
      "angle_span",
      [](double l, double u) {
        const AngleSpan s = angle_span(l, u);
        return py::make_tuple(s.theta_min, s.theta_max, s.theta_mid, s.theta_d);
      },
      py::arg("l"), py::arg("u"),
      "(theta_min, theta_max, theta_mid, theta_d) of a bound interval.");

  m.def("knot", &knot, py::arg("alpha"),
        "x-coordinate where the ray at angle alpha meets (x, (x^2-1)/2).");

  m.def(
      "error_bounds",
      [](double l, double u, int nu) {
        const ErrorBounds e = error_bounds(l, u, nu);
        return py::make_tuple(e.sqrt_gap, e.square_gap);
      },
      py::arg("l"), py::arg("u"), py::arg("nu"),
      "(sqrt_gap, square_gap) at refinement level nu >= 2.");

  m.def(
      "enumerate_disjunction",
      [](double l, double u, int nu) {
        py::list out;
        for (const auto& d : enumerate_disjunction(l, u, nu)) {
          py::dict e;
          e["z"] = d.z;
          e["phi"] = d.angles.phi;
          e["beta"] = d.angles.beta;
          e["knots"] = py::make_tuple(knot(d.angles.phi), knot(d.angles.beta));
          out.append(e);
        }
        return out;
      },
      py::arg("l"), py::arg("u"), py::arg("nu"),
      "The 2^nu sector triangles of the level-nu disjunction.");

  m.def(
      "check_projection_equivalence",
      [](double l, double u, int nu, const std::string& mode) {
        const auto m_ = parse_mode(mode);
        const EquivalenceReport rep = check_projection_equivalence(
            l, u, nu, m_.value_or(BlockMode::D));
        py::dict out;
        out["pass"] = rep.pass();
        out["points_checked"] = rep.points_checked;
        out["disagreements"] = static_cast<int>(rep.disagreements.size());
        out["json"] = rep.to_json();
        return out;
      },
      py::arg("l"), py::arg("u"), py::arg("nu"), py::arg("mode") = "d");

  m.def("gap_percent",
        [](double upper, double lower) { return gap_percent(upper, lower); },
        py::arg("upper"), py::arg("lower"));
  m.def("additional_gap_closed", &additional_gap_closed, py::arg("better_lb"),
        py::arg("worse_lb"), py::arg("best_ub"));

  m.def(
      "block_counts",
      [](double l, double u, int nu, const std::string& mode) {
        const auto m_ = parse_mode(mode);
        const LiftedBlock b =
            build_block(l, u, nu, m_.value_or(BlockMode::D));
        return py::make_tuple(b.num_continuous(), b.num_binary());
      },
      py::arg("l"), py::arg("u"), py::arg("nu"), py::arg("mode") = "d",
      "(continuous, binary) variable counts of one lifted block.");
}
