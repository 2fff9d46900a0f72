#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "recognet/bnet_format.hpp"
#include "recognet/cli.hpp"
#include "recognet/eigensolver.hpp"
#include "recognet/error.hpp"
#include "recognet/net.hpp"
#include "recognet/oracle.hpp"

namespace py = pybind11;
using namespace recognet;

namespace {

cli::Solver solver_from(const std::string& name) {
  if (auto s = cli::parse_solver(name)) return *s;
  throw Error(ErrorCode::Usage, "unknown solver '" + name + "'");
}

CycleOrientation orientation_from(const std::string& name) {
  if (name == "literal") return CycleOrientation::Literal;
  if (name == "explicit") return CycleOrientation::Explicit;
  throw Error(ErrorCode::Usage, "orientation must be 'literal' or 'explicit'");
}

py::dict report_to_dict(const cli::InferenceReport& r) {
  py::dict beliefs, diagnostics, references;
  for (const auto& [node, bel] : r.beliefs) beliefs[py::str(node)] = bel;
  for (const auto& [k, v] : r.diagnostics) diagnostics[py::str(k)] = v;
  for (const auto& ref : r.references) references[py::str(ref.node)] = std::string(cli::to_string(ref.match));
  py::dict out;
  out["solver"] = r.solver;
  out["structure"] = r.structure;
  out["beliefs"] = beliefs;
  out["diagnostics"] = diagnostics;
  out["warnings"] = r.warnings;
  out["references"] = references;
  return out;
}

Evidence evidence_from(const std::map<std::string, std::size_t>& m) {
  Evidence ev;
  for (const auto& [k, v] : m) ev.observe(k, v);
  return ev;
}

}  // namespace

PYBIND11_MODULE(_recognet, m) {
  m.doc() = "Discrete Bayes nets for model-based recognition";

  static const py::handle error_type = py::exception<Error>(m, "RecognetError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(py::str(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("detail") = e.detail();
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<BayesNet>(m, "BayesNet")
      .def_property_readonly("node_ids",
                             [](const BayesNet& n) {
                               std::vector<std::string> ids;
                               for (const auto& d : n.nodes()) ids.push_back(d.id);
                               return ids;
                             })
      .def_property_readonly("arcs",
                             [](const BayesNet& n) {
                               std::vector<std::pair<std::string, std::string>> arcs;
                               for (const auto& a : n.arcs()) arcs.emplace_back(a.parent, a.child);
                               return arcs;
                             })
      .def("cardinality", [](const BayesNet& n, const std::string& id) { return n.cardinality(n.index_of(id)); })
      .def("parents", [](const BayesNet& n, const std::string& id) { return n.cpt(n.index_of(id)).parents; })
      .def("table", [](const BayesNet& n, const std::string& id) { return n.cpt(n.index_of(id)).table; })
      .def("structure", [](const BayesNet& n) { return std::string(to_string(classify_structure(n))); })
      .def_property_readonly("warnings", &BayesNet::warnings)
      .def("__len__", &BayesNet::size)
      .def("__eq__", [](const BayesNet& a, const BayesNet& b) { return a == b; });

  py::class_<BnetDocument>(m, "Document")
      .def_readonly("net", &BnetDocument::net)
      .def_property_readonly("evidence", [](const BnetDocument& d) {
        std::map<std::string, std::size_t> out(d.evidence.assignments().begin(), d.evidence.assignments().end());
        return out;
      })
      .def_readonly("levels", &BnetDocument::levels);

  m.def("parse_bnet", [](const std::string& text) { return parse_bnet(text); }, py::arg("text"));
  m.def("load_bnet", &load_bnet, py::arg("path"));
  m.def("serialize_bnet", &serialize_bnet, py::arg("document"));

  m.def(
      "posterior",
      [](const BnetDocument& d, const std::string& node, std::optional<std::map<std::string, std::size_t>> evidence) {
        return posterior(d.net, evidence ? evidence_from(*evidence) : d.evidence, node);
      },
      py::arg("document"), py::arg("node"), py::arg("evidence") = py::none(),
      "Exact posterior by joint enumeration. Uses the document's evidence unless given.");

  m.def("reverse_arc", &reverse_arc, py::arg("net"), py::arg("parent"), py::arg("child"));

  m.def(
      "infer",
      [](const BnetDocument& d, const std::string& solver, const std::vector<std::string>& query,
         const std::string& orientation, const std::map<std::string, Vector>& references) {
        cli::InferOptions options;
        options.orientation = orientation_from(orientation);
        options.references = references;
        return report_to_dict(cli::infer(d, solver_from(solver), query, options));
      },
      py::arg("document"), py::arg("solver") = "auto", py::arg("query") = std::vector<std::string>{},
      py::arg("orientation") = "literal", py::arg("references") = std::map<std::string, Vector>{});

  m.def(
      "compare",
      [](const BnetDocument& d, const std::vector<std::string>& solvers, const std::vector<std::string>& query) {
        std::vector<cli::Solver> parsed;
        for (const auto& s : solvers) parsed.push_back(solver_from(s));
        const cli::ComparisonReport r = cli::compare(d, parsed, query);
        py::list runs, divergences;
        for (const auto& run : r.runs) runs.append(report_to_dict(run));
        for (const auto& x : r.divergences)
          divergences.append(py::make_tuple(x.node, x.first_solver, x.second_solver, x.l1));
        py::dict out;
        out["structure"] = r.structure;
        out["runs"] = runs;
        out["divergences"] = divergences;
        return out;
      },
      py::arg("document"), py::arg("solvers"), py::arg("query") = std::vector<std::string>{});

  m.def(
      "solve_shared_leaf_pair",
      [](const BnetDocument& d, const std::string& orientation) {
        EigenSolveOptions options;
        options.orientation = orientation_from(orientation);
        const SharedLeafSolution s = solve_shared_leaf_pair(d.net, d.evidence, options);
        py::dict out;
        out["roots"] = py::make_tuple(s.first_root, s.second_root);
        out["beliefs"] = py::make_tuple(s.first_belief, s.second_belief);
        out["cycle_eigenvalue"] = s.alpha.cycle_eigenvalue;
        out["transposed_cycle_eigenvalue"] = s.alpha.transposed_cycle_eigenvalue;
        out["leaf_slice_eigenvalues"] =
            py::make_tuple(s.alpha.first_leaf_slice_eigenvalue, s.alpha.second_leaf_slice_eigenvalue);
        out["residual"] = fixed_point_residual(s.cycle, s.first_belief);
        if (s.two_cycle_beliefs) out["two_cycle_beliefs"] = py::make_tuple(s.two_cycle_beliefs->first, s.two_cycle_beliefs->second);
        out["warnings"] = s.warnings;
        return out;
      },
      py::arg("document"), py::arg("orientation") = "literal");

  m.attr("__version__") = std::string(cli::kVersion);
}
