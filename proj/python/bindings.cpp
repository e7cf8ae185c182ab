#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "divsearch/graph.hpp"
#include "divsearch/io.hpp"
#include "divsearch/metrics.hpp"
#include "divsearch/pathsim.hpp"
#include "divsearch/pipeline.hpp"

namespace py = pybind11;
using namespace divsearch;

namespace {

template <typename T>
std::vector<T> to_vector(std::span<const T> s) {
  return {s.begin(), s.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Diversified top-k similar-node search in attributed networks.";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<AttributedGraph>(m, "AttributedGraph")
      .def_property_readonly("node_count", &AttributedGraph::node_count)
      .def_property_readonly("edge_count", &AttributedGraph::edge_count)
      .def_property_readonly("attribute_universe_size", &AttributedGraph::attribute_universe_size)
      .def_property_readonly("max_degree", &AttributedGraph::max_degree)
      .def("degree", &AttributedGraph::degree)
      .def("neighbors", [](const AttributedGraph& g, NodeId u) { return to_vector(g.neighbors(u)); })
      .def("attributes", [](const AttributedGraph& g, NodeId u) { return to_vector(g.attributes(u)); })
      .def("label", &AttributedGraph::label)
      .def("find_label", &AttributedGraph::find_label)
      .def("has_edge", &AttributedGraph::has_edge)
      .def("__eq__", [](const AttributedGraph& a, const AttributedGraph& b) { return a == b; });

  m.def(
      "load_graph",
      [](const std::filesystem::path& edges, std::optional<std::filesystem::path> attrs) {
        return load_graph(edges, attrs);
      },
      py::arg("edges"), py::arg("attrs") = py::none());
  m.def(
      "generate_er",
      [](std::size_t n, double p, std::size_t attrs, std::size_t per_node, std::uint64_t seed) {
        return generate_er({n, p, attrs, per_node, seed});
      },
      py::arg("n"), py::arg("p"), py::arg("attrs") = 0, py::arg("attrs_per_node") = 0, py::arg("seed") = 0);

  py::class_<PathIndex>(m, "PathIndex")
      .def_static(
          "build",
          [](const AttributedGraph& g, std::size_t T, std::optional<std::size_t> R, std::optional<double> epsilon,
             std::uint64_t seed, unsigned threads) {
            SamplingParams p;
            p.path_length = T;
            p.num_paths = R;
            p.epsilon = epsilon;
            p.seed = seed;
            py::gil_scoped_release release;
            return PathIndex::build(g, p, threads);
          },
          py::arg("graph"), py::arg("T") = 5, py::arg("R") = py::none(), py::arg("epsilon") = py::none(),
          py::arg("seed") = 0, py::arg("threads") = 1)
      .def_property_readonly("num_paths", &PathIndex::num_paths)
      .def_property_readonly("path_length", &PathIndex::path_length)
      .def_property_readonly("seed", &PathIndex::seed)
      .def("path", [](const PathIndex& idx, std::size_t i) { return to_vector(idx.path(i)); })
      .def("paths_of", [](const PathIndex& idx, NodeId u) { return to_vector(idx.paths_of(u)); })
      .def("co_occurrence", &PathIndex::co_occurrence)
      .def("__eq__", [](const PathIndex& a, const PathIndex& b) { return a == b; });

  m.def("relevance", py::overload_cast<const PathIndex&, NodeId, NodeId>(&relevance), py::arg("index"), py::arg("q"),
        py::arg("u"));

  m.def(
      "save_index",
      [](const AttributedGraph& g, const PathIndex& idx, const std::filesystem::path& path) {
        save_index({g, idx}, path);
      },
      py::arg("graph"), py::arg("index"), py::arg("path"));
  m.def(
      "load_index",
      [](const std::filesystem::path& path) {
        auto bundle = load_index(path);
        return py::make_tuple(std::move(bundle.graph), std::move(bundle.paths));
      },
      py::arg("path"));

  py::class_<CandidateSet>(m, "CandidateSet")
      .def_property_readonly("query", &CandidateSet::query)
      .def_property_readonly("num_paths", &CandidateSet::num_paths)
      .def_property_readonly("p_max", &CandidateSet::p_max)
      .def_property_readonly("p_min", &CandidateSet::p_min)
      .def("__len__", &CandidateSet::size)
      .def_property_readonly("members",
                             [](const CandidateSet& c) {
                               std::vector<std::pair<NodeId, double>> out;
                               for (const auto& x : c.members()) out.emplace_back(x.node, x.relevance);
                               return out;
                             })
      .def("diss", &CandidateSet::diss)
      .def("position_of", &CandidateSet::position_of)
      .def("to_tsv",
           [](const CandidateSet& c) {
             std::ostringstream out;
             c.write_tsv(out);
             return out.str();
           })
      .def_static("from_tsv", [](const std::string& text) {
        std::istringstream in(text);
        return CandidateSet::read_tsv(in);
      });

  m.def("build_candidate_set", &build_candidate_set, py::arg("graph"), py::arg("index"), py::arg("q"),
        py::arg("limit") = 2000);

  py::class_<ResultSet>(m, "ResultSet")
      .def_readonly("query", &ResultSet::query)
      .def_readonly("algorithm", &ResultSet::algorithm)
      .def_readonly("k", &ResultSet::k)
      .def_readonly("lambda_", &ResultSet::lambda)
      .def_readonly("r", &ResultSet::r)
      .def_readonly("nodes", &ResultSet::nodes)
      .def_readonly("objective", &ResultSet::objective)
      .def_readonly("rho_used", &ResultSet::rho_used)
      .def_readonly("conflict_max_degree", &ResultSet::conflict_max_degree)
      .def_readonly("warnings", &ResultSet::warnings)
      .def("to_json", [](const ResultSet& r, const AttributedGraph& g) { return result_to_json(r, g); })
      .def_static("from_json", &result_from_json, py::arg("text"), py::arg("graph"));

  m.def("algorithm_names", &algorithm_names);
  m.def("run_algorithm", &run_algorithm, py::arg("name"), py::arg("cand"), py::arg("graph"), py::arg("k"),
        py::arg("lambda_") = py::none(), py::arg("r") = py::none());
  m.def(
      "gacd",
      [](const CandidateSet& c, const AttributedGraph& g, std::size_t k, double lambda) {
        return gacd(c, g, k, {lambda, ObjectiveKind::attribute_coverage});
      },
      py::arg("cand"), py::arg("graph"), py::arg("k"), py::arg("lambda_"));
  m.def(
      "grdacd",
      [](const CandidateSet& c, const AttributedGraph& g, std::size_t k, double lambda, double r) {
        return grdacd(c, g, k, {lambda, ObjectiveKind::attribute_coverage}, r);
      },
      py::arg("cand"), py::arg("graph"), py::arg("k"), py::arg("lambda_"), py::arg("r"));
  m.def("ep", &ep, py::arg("cand"), py::arg("graph"), py::arg("k"), py::arg("lambda_"), py::arg("hops"),
        py::arg("r") = py::none());
  m.def("top_k", &top_k_relevance, py::arg("cand"), py::arg("graph"), py::arg("k"), py::arg("lambda_") = 0.0);
  m.def(
      "expansion_set",
      [](const AttributedGraph& g, const std::vector<NodeId>& nodes, int hops) { return expansion_set(g, nodes, hops); },
      py::arg("graph"), py::arg("nodes"), py::arg("hops"));

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("rel", &EvalReport::rel)
      .def_readonly("density", &EvalReport::density)
      .def_readonly("acr", &EvalReport::acr)
      .def_readonly("min_diss", &EvalReport::min_diss)
      .def_readonly("k_effective", &EvalReport::k_effective)
      .def_readonly("warnings", &EvalReport::warnings);

  m.def("evaluate", &evaluate, py::arg("result"), py::arg("cand"), py::arg("graph"));
}
