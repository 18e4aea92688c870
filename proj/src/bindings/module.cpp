#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "k3hiso/json_io.hpp"
#include "k3hiso/oracle.hpp"

namespace py = pybind11;
using namespace k3h;

namespace {

ColoredGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges,
                        const std::optional<std::vector<int>>& vertex_colors,
                        const std::optional<std::vector<std::tuple<int, int, int>>>& arc_colors) {
  ColoredGraph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v);
  if (vertex_colors) {
    if (static_cast<int>(vertex_colors->size()) != n)
      throw DomainError("vertex_colors must have one entry per vertex");
    g.vertex_colors = *vertex_colors;
  }
  if (arc_colors)
    for (auto [u, v, c] : *arc_colors) g.set_arc_color(u, v, c);
  return g;
}

py::dict result_to_dict(const IsoResult& r) {
  py::dict d;
  d["verdict"] = verdict_name(r.verdict);
  if (r.witness)
    d["witness"] = *r.witness;
  else
    d["witness"] = py::none();
  d["h"] = r.h;
  py::dict stats;
  stats["node_pairs"] = r.stats.node_pairs;
  stats["tau_candidates"] = r.stats.tau_candidates;
  stats["coset_calls"] = r.stats.coset_calls;
  stats["s2_candidates"] = r.stats.s2_candidates;
  d["stats"] = stats;
  if (r.verdict == Verdict::MinorEvidence) d["minor_detail"] = r.minor_detail;
  return d;
}

py::dict report_to_dict(const DecompositionReport& r) {
  py::dict d;
  d["td_valid"] = r.td_valid;
  d["node_count_ok"] = r.node_count_ok;
  d["adhesion_ok"] = r.adhesion_ok;
  d["options_ok"] = r.options_ok;
  d["root_anchor_ok"] = r.root_anchor_ok;
  d["anchor_size_ok"] = r.anchor_size_ok;
  d["anchor_between_ok"] = r.anchor_between_ok;
  d["closure_ok"] = r.closure_ok;
  d["all_ok"] = r.all_ok();
  d["failing_node"] = r.failing_node;
  d["detail"] = r.detail;
  return d;
}

}  // namespace

PYBIND11_MODULE(_k3hiso, m) {
  m.doc() = "isomorphism of vertex- and arc-colored graphs excluding K_{3,h} minors";

  static py::exception<MinorEvidenceError> exc_minor(m, "MinorEvidence");
  static py::exception<PreconditionError> exc_pre(m, "PreconditionFailure");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const MinorEvidenceError& e) {
      exc_minor(e.what());
    } catch (const PreconditionError& e) {
      exc_pre(e.what());
    }
  });

  py::class_<ColoredGraph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("n"), py::arg("edges"),
           py::arg("vertex_colors") = py::none(), py::arg("arc_colors") = py::none())
      .def_readonly("n", &ColoredGraph::n)
      .def_property_readonly("vertex_colors",
                             [](const ColoredGraph& g) { return g.vertex_colors; })
      .def("edges", &ColoredGraph::edges)
      .def("edge_count", &ColoredGraph::edge_count)
      .def("has_edge", &ColoredGraph::has_edge)
      .def("arc_color", &ColoredGraph::arc_color)
      .def("degree", &ColoredGraph::degree)
      .def("__repr__", [](const ColoredGraph& g) {
        return "Graph(n=" + std::to_string(g.n) + ", m=" + std::to_string(g.edge_count()) + ")";
      });

  py::class_<Decomposition>(m, "Decomposition")
      .def_property_readonly("node_count",
                             [](const Decomposition& d) { return d.nodes.size(); })
      .def_property_readonly("lambda_sets", [](const Decomposition& d) { return d.lambda; })
      .def("bag", [](const Decomposition& d, int t) { return d.nodes.at(t).bag; })
      .def("gamma", [](const Decomposition& d, int t) { return d.nodes.at(t).anchors; })
      .def("to_json", [](const Decomposition& d) { return decomposition_to_json(d); });

  m.def("from_graph6", &parse_graph6, py::arg("text"));
  m.def("to_graph6", &to_graph6, py::arg("graph"));
  m.def("from_dimacs", &parse_dimacs, py::arg("text"));

  m.def("is_connected", &is_connected);
  m.def("is_3_connected", &is_3_connected);
  m.def("components_avoiding", &components_avoiding, py::arg("graph"), py::arg("removed"));
  m.def("open_neighborhood", &open_neighborhood, py::arg("graph"), py::arg("vertices"));
  m.def(
      "contains_k3h_minor",
      [](const ColoredGraph& g, int h, int cap) -> py::object {
        auto w = contains_k3h_minor(g, h, cap);
        if (!w) return py::none();
        py::dict d;
        d["left"] = std::vector<VertexSet>{w->left[0], w->left[1], w->left[2]};
        d["right"] = w->right;
        d["h"] = w->h;
        return d;
      },
      py::arg("graph"), py::arg("h"), py::arg("size_cap") = 20);

  m.def(
      "wl1_classes",
      [](const ColoredGraph& g) { return wl1_uniform_seed(g).class_sets(); },
      py::arg("graph"));
  m.def(
      "wl2_diagonal_classes",
      [](const ColoredGraph& g) { return wl2_uniform_seed(g).diagonal().class_sets(); },
      py::arg("graph"));

  m.def("closure", &closure, py::arg("graph"), py::arg("x"), py::arg("t"), py::arg("k"));
  m.def("is_tk_bounded", &is_tk_bounded, py::arg("graph"), py::arg("t"), py::arg("k"));

  m.def("decompose", &decompose, py::arg("graph"), py::arg("s"), py::arg("h"));
  m.def(
      "verify_decomposition",
      [](const ColoredGraph& g, const Decomposition& d, const VertexSet& s, int h) {
        return report_to_dict(verify_decomposition(g, d, s, h));
      },
      py::arg("graph"), py::arg("decomposition"), py::arg("s"), py::arg("h"));
  m.def("verify_separator_bound", &verify_separator_bound, py::arg("graph"), py::arg("x"),
        py::arg("h"));

  m.def(
      "isomorphic_k3h_free",
      [](const ColoredGraph& g1, const ColoredGraph& g2, int h, double timeout) {
        return result_to_dict(isomorphic_k3h_free(g1, g2, h, timeout));
      },
      py::arg("g1"), py::arg("g2"), py::arg("h"), py::arg("timeout") = 0.0);
  m.def(
      "isomorphic_genus",
      [](const ColoredGraph& g1, const ColoredGraph& g2, int genus, double timeout) {
        return result_to_dict(isomorphic_genus(g1, g2, genus, timeout));
      },
      py::arg("g1"), py::arg("g2"), py::arg("genus"), py::arg("timeout") = 0.0);

  m.def(
      "brute_force_iso",
      [](const ColoredGraph& g1, const ColoredGraph& g2) -> py::object {
        auto r = brute_force_iso(g1, g2);
        if (!r) return py::none();
        return py::cast(*r);
      },
      py::arg("g1"), py::arg("g2"));

  m.def("gen_3connected_planar", &gen_3connected_planar, py::arg("n"), py::arg("seed"));
  m.def("permuted_copy", &permuted_copy, py::arg("graph"), py::arg("seed"));
  m.def("tweak_nonisomorphic", &tweak_nonisomorphic, py::arg("graph"), py::arg("seed"),
        py::arg("retry_budget") = 300);
  m.def("named_graph", &named_graph, py::arg("name"));
}
