#include <doctest.h>

#include <cmath>
#include <random>

#include "divsearch/diversify.hpp"
#include "test_support.hpp"

using namespace divsearch;
namespace t = divsearch::testing;

namespace {

CandidateSet candidates(const std::vector<double>& relevance, const std::vector<std::vector<double>>& diss = {}) {
  std::vector<Candidate> members;
  for (std::size_t i = 0; i < relevance.size(); ++i) members.push_back({static_cast<NodeId>(i + 1), relevance[i]});
  auto matrix = diss;
  if (matrix.empty()) matrix.assign(relevance.size(), std::vector<double>(relevance.size(), 1.0));
  return CandidateSet::from_matrix(0, members, matrix);
}

AttributedGraph attributed(std::size_t n, std::vector<std::vector<AttributeId>> attrs, std::size_t universe) {
  return AttributedGraph::from_edges(n, {}, std::move(attrs), universe);
}

}  // namespace

TEST_CASE("marginal_gain examples") {
  CoverageInstance inst;
  inst.nodes = {1, 2};
  inst.relevance = {0.2, 0.7};
  inst.sets = {{0, 1}, {0, 1, 2}};
  inst.universe_size = 10;

  SUBCASE("lambda = 0 is pure relevance") {
    inst.lambda = 0.0;
    SelectionState s(inst);
    CHECK(s.marginal_gain(0) == doctest::Approx(0.2));
  }
  SUBCASE("lambda = 0.5, two new of ten") {
    inst.lambda = 0.5;
    SelectionState s(inst);
    CHECK(s.marginal_gain(0) == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("lambda = 1, fully covered set gains nothing") {
    inst.lambda = 1.0;
    SelectionState s(inst);
    s.add(1);
    CHECK(s.marginal_gain(0) == 0.0);
    CHECK(s.covered_count() == 3);
    CHECK(s.objective_value() == doctest::Approx(0.3));
    CHECK_THROWS_AS(s.add(1), std::logic_error);
  }
}

TEST_CASE("selection state keeps its objective consistent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto ri = t::random_instance(rng, 8, 12, 0.4);
    SelectionState s(ri.inst);
    std::vector<std::size_t> order{3, 0, 7, 5};
    std::vector<std::size_t> so_far;
    for (std::size_t pos : order) {
      const double before = s.objective_value();
      const double gain = s.marginal_gain(pos);
      s.add(pos);
      so_far.push_back(pos);
      CHECK(s.objective_value() == doctest::Approx(before + gain).epsilon(1e-12));
      CHECK(s.objective_value() == doctest::Approx(t::oracle_value(ri.inst, so_far)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gacd: max k-cover instance") {
  // Attribute ids a = 0, b = 1, c = 2.
  const auto g = attributed(4, {{}, {0, 1}, {1}, {2}}, 3);
  const auto cand = candidates({0.5, 0.4, 0.3});
  const auto result = gacd(cand, g, 2, {1.0, ObjectiveKind::attribute_coverage});
  CHECK(result.nodes == std::vector<NodeId>{1, 3});
  CHECK(result.objective == doctest::Approx(1.0));
  CHECK(result.algorithm == "gacd");
  CHECK(result.warnings.empty());
}

TEST_CASE("gacd: lambda = 0 is top-k in candidate order") {
  const auto g = attributed(6, {{}, {0}, {0}, {1}, {2}, {3}}, 4);
  const auto cand = candidates({0.9, 0.8, 0.8, 0.3, 0.1});
  const auto result = gacd(cand, g, 3, {0.0, ObjectiveKind::attribute_coverage});
  CHECK(result.nodes == std::vector<NodeId>{1, 2, 3});
  CHECK(result.nodes == top_k_relevance(cand, g, 3).nodes);
}

TEST_CASE("gacd: ties go to higher relevance, then lower node id") {
  // Node 2 and 3 both bring one new attribute; node 3 has higher relevance
  // but the gains differ only through relevance, so use lambda = 1.
  const auto g = attributed(4, {{}, {0}, {1}, {2}}, 3);
  const auto cand = candidates({0.5, 0.5, 0.5});
  const auto result = gacd(cand, g, 3, {1.0, ObjectiveKind::attribute_coverage});
  CHECK(result.nodes == std::vector<NodeId>{1, 2, 3});

  const auto cand2 = candidates({0.6, 0.5, 0.4});
  const auto r2 = gacd(cand2, g, 1, {1.0, ObjectiveKind::attribute_coverage});
  CHECK(r2.nodes == std::vector<NodeId>{1});
}

TEST_CASE("gacd: degenerate inputs") {
  const auto g = attributed(3, {{}, {0}, {1}}, 2);
  SUBCASE("empty candidate set") {
    const auto r = gacd(CandidateSet::from_matrix(0, {}, {}), g, 3, {0.5, ObjectiveKind::attribute_coverage});
    CHECK(r.nodes.empty());
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0] == "empty candidate set");
  }
  SUBCASE("fewer candidates than k") {
    const auto r = gacd(candidates({0.5, 0.4}), g, 5, {0.5, ObjectiveKind::attribute_coverage});
    CHECK(r.nodes.size() == 2);
    CHECK(r.warnings.size() == 1);
  }
  SUBCASE("empty universe with lambda > 0") {
    const auto bare = attributed(3, {}, 0);
    const auto r = gacd(candidates({0.5, 0.4}), bare, 1, {0.5, ObjectiveKind::attribute_coverage});
    CHECK(r.nodes == std::vector<NodeId>{1});
    CHECK(r.objective == doctest::Approx(0.25));
    CHECK(r.warnings.size() == 1);
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(gacd(candidates({0.5}), g, 0, {0.5, ObjectiveKind::attribute_coverage}), std::invalid_argument);
    CHECK_THROWS_AS(gacd(candidates({0.5}), g, 1, {1.5, ObjectiveKind::attribute_coverage}), std::invalid_argument);
    CHECK_THROWS_AS(gacd(candidates({0.5}), g, 1, {-0.1, ObjectiveKind::attribute_coverage}),
                    std::invalid_argument);
  }
}

TEST_CASE("gacd: 10 candidates within (1 - 1/e) of brute force") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    auto ri = t::random_instance(rng, 10, 8, 0.5);
    const auto g = t::graph_for_instance(ri.inst);
    const auto result = gacd(ri.cand, g, 3, {0.5, ObjectiveKind::attribute_coverage});
    const double opt = t::brute_force_opt(ri.inst, 3);
    CHECK(result.nodes.size() == 3);
    CHECK(result.objective >= (1.0 - std::exp(-1.0)) * opt - 1e-12);
    CHECK(result.objective <= opt + 1e-12);
  }
}

TEST_CASE("build_dissimilarity_graph") {
  const std::vector<std::vector<double>> diss{
      {0.0, 0.2, 0.7, 0.5},
      {0.2, 0.0, 0.49, 0.9},
      {0.7, 0.49, 0.0, 0.1},
      {0.5, 0.9, 0.1, 0.0},
  };
  const auto cand = candidates({0.4, 0.3, 0.2, 0.1}, diss);

  SUBCASE("r = 0 has no edges") {
    const auto dg = build_dissimilarity_graph(cand, 0.0);
    CHECK(dg.edge_count == 0);
    CHECK(dg.max_degree == 0);
  }
  SUBCASE("r > 1 is complete") {
    const auto dg = build_dissimilarity_graph(cand, 1.01);
    CHECK(dg.edge_count == 6);
    CHECK(dg.max_degree == 3);
  }
  SUBCASE("r = 0.5 takes the pairs strictly below 0.5") {
    const auto dg = build_dissimilarity_graph(cand, 0.5);
    CHECK(dg.edge_count == 3);
    CHECK(dg.adjacency[0] == std::vector<std::uint32_t>{1});
    CHECK(dg.adjacency[1] == std::vector<std::uint32_t>{0, 2});
    CHECK(dg.adjacency[2] == std::vector<std::uint32_t>{1, 3});
    CHECK(dg.adjacency[3] == std::vector<std::uint32_t>{2});
    CHECK(dg.max_degree == 2);
  }
}

TEST_CASE("grdacd: edge-free conflict graph matches gacd") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    auto ri = t::random_instance(rng, 9, 10, trial % 2 ? 0.3 : 0.8);
    const auto g = t::graph_for_instance(ri.inst);
    const ObjectiveSpec spec{ri.inst.lambda, ObjectiveKind::attribute_coverage};
    const auto a = gacd(ri.cand, g, 4, spec);
    const auto b = grdacd(ri.cand, g, 4, spec, 0.0);
    CHECK(a.nodes == b.nodes);
    CHECK(a.objective == b.objective);
    CHECK(b.rho_used == std::size_t{1});
    CHECK(b.algorithm == "grdacd");
  }
}

TEST_CASE("grdacd: a single conflicting pair yields one node and a warning") {
  const auto g = attributed(3, {{}, {0}, {1}}, 2);
  const auto cand = candidates({0.6, 0.5}, {{0.0, 0.1}, {0.1, 0.0}});
  const auto r = grdacd(cand, g, 2, {0.5, ObjectiveKind::attribute_coverage}, 0.5);
  CHECK(r.nodes == std::vector<NodeId>{1});
  CHECK(r.warnings.size() == 1);
  CHECK(r.conflict_max_degree == std::size_t{1});
}

TEST_CASE("grdacd: hand-set 10-candidate matrix against the constrained optimum") {
  // Candidates 0..9; low dissimilarity inside the blocks {0,1,2}, {3,4},
  // {5,6,7}, everything else far apart.
  const std::size_t m = 10;
  std::vector<std::vector<double>> diss(m, std::vector<double>(m, 0.8));
  auto near = [&](std::size_t i, std::size_t j, double v) { diss[i][j] = diss[j][i] = v; };
  for (std::size_t i = 0; i < m; ++i) diss[i][i] = 0.0;
  near(0, 1, 0.1);
  near(0, 2, 0.3);
  near(1, 2, 0.2);
  near(3, 4, 0.05);
  near(5, 6, 0.4);
  near(5, 7, 0.45);
  near(6, 7, 0.35);
  near(8, 9, 0.5);
  const auto cand = candidates({0.9, 0.85, 0.8, 0.7, 0.65, 0.5, 0.45, 0.4, 0.3, 0.2}, diss);
  std::vector<std::vector<AttributeId>> attrs{{}, {0, 1}, {0, 1, 2}, {3}, {4, 5}, {4}, {6, 7}, {1}, {2, 6}, {7}, {0}};
  const auto g = attributed(m + 1, attrs, 8);

  const ObjectiveSpec spec{0.5, ObjectiveKind::attribute_coverage};
  const auto result = grdacd(cand, g, 3, spec, 0.5);
  const auto inst = make_attribute_instance(cand, g, 0.5);
  const auto dg = build_dissimilarity_graph(cand, 0.5);
  REQUIRE(dg.max_degree == 2);

  for (std::size_t a = 0; a < result.nodes.size(); ++a)
    for (std::size_t b = a + 1; b < result.nodes.size(); ++b)
      CHECK(cand.diss(*cand.position_of(result.nodes[a]), *cand.position_of(result.nodes[b])) >= 0.5);
  CHECK(result.nodes.size() == 3);
  const double opt = t::brute_force_constrained_opt(inst, diss, 0.5, 3);
  CHECK(result.objective >= opt / static_cast<double>(dg.max_degree) - 1e-12);
  CHECK(result.objective <= opt + 1e-12);
  CHECK(*result.rho_used <= dg.max_degree);
}

TEST_CASE("grdacd: results are always pairwise r-dissimilar") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const double r = (trial % 5) * 0.2;
    auto ri = t::random_instance(rng, 10, 8, 0.5);
    const auto g = t::graph_for_instance(ri.inst);
    const auto res = grdacd(ri.cand, g, 4, {0.5, ObjectiveKind::attribute_coverage}, r);
    CHECK(res.nodes.size() >= 1);
    for (std::size_t a = 0; a < res.nodes.size(); ++a)
      for (std::size_t b = a + 1; b < res.nodes.size(); ++b)
        CHECK(ri.diss[res.nodes[a] - 1][res.nodes[b] - 1] >= r);
  }
}

TEST_CASE("expansion_set") {
  const auto path = t::path_graph(5);
  const NodeId mid[] = {2};
  CHECK(expansion_set(path, mid, 1) == std::vector<NodeId>{1, 2, 3});
  CHECK(expansion_set(path, mid, 2) == std::vector<NodeId>{0, 1, 2, 3, 4});
  const NodeId ends[] = {0, 4};
  CHECK(expansion_set(path, ends, 1) == std::vector<NodeId>{0, 1, 3, 4});

  const auto lone = t::make_graph(1, {});
  const NodeId only[] = {0};
  CHECK(expansion_set(lone, only, 2) == std::vector<NodeId>{0});
  CHECK_THROWS_AS(expansion_set(path, mid, 3), std::invalid_argument);
}

TEST_CASE("ep: expansion objective") {
  SUBCASE("lambda = 0 is top-k for both hop counts") {
    const auto g = t::path_graph(8);
    const auto cand = candidates({0.9, 0.7, 0.6, 0.5, 0.2});
    const auto top = top_k_relevance(cand, g, 3).nodes;
    CHECK(ep(cand, g, 3, 0.0, 1).nodes == top);
    CHECK(ep(cand, g, 3, 0.0, 2).nodes == top);
  }
  SUBCASE("lambda = 1 prefers the disjoint neighborhood") {
    // Nodes 1 and 2 are twins (both adjacent to exactly 5 and 6 plus each
    // other); node 3 sits in a separate component with node 4.
    const auto g = t::make_graph(7, {{1, 2}, {1, 5}, {1, 6}, {2, 5}, {2, 6}, {3, 4}});
    const auto cand = candidates({0.9, 0.8, 0.1});
    const auto r = ep(cand, g, 2, 1.0, 1);
    CHECK(r.nodes == std::vector<NodeId>{1, 3});
    CHECK(r.algorithm == "ep1");
  }
  SUBCASE("universe is the union of candidate expansions") {
    const auto g = t::path_graph(6);
    const auto cand = candidates({0.5, 0.4});
    const auto inst = make_expansion_instance(cand, g, 0.5, 1);
    CHECK(inst.universe_size == 4);  // {0,1,2,3}
    inst.validate();
  }
  SUBCASE("within (1 - 1/e) of brute force on ER graphs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto g = generate_er({40, 0.08, 0, 0, seed});
      std::vector<Candidate> members;
      for (NodeId u = 1; u <= 10; ++u) members.push_back({u, 1.0 - 0.05 * u});
      std::vector<std::vector<double>> diss(10, std::vector<double>(10, 1.0));
      const auto cand = CandidateSet::from_matrix(0, members, diss);
      for (int hops : {1, 2}) {
        const auto inst = make_expansion_instance(cand, g, 0.6, hops);
        const auto r = ep(cand, g, 3, 0.6, hops);
        CHECK(r.objective >= (1.0 - std::exp(-1.0)) * t::brute_force_opt(inst, 3) - 1e-12);
      }
    }
  }
  SUBCASE("r turns ep into the constrained variant") {
    const auto g = t::path_graph(4);
    const auto cand = candidates({0.9, 0.8, 0.7}, {{0, 0.1, 0.9}, {0.1, 0, 0.9}, {0.9, 0.9, 0}});
    const auto r = ep(cand, g, 3, 0.5, 2, 0.5);
    CHECK(r.algorithm == "rdep2");
    CHECK(r.nodes.size() == 2);
    CHECK(r.rho_used.has_value());
  }
}

TEST_CASE("properties: submodularity and monotonicity on small instances") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 15; ++trial) {
    auto ri = t::random_instance(rng, 6, 6, (trial % 4) / 3.0);
    const std::size_t m = ri.inst.size();
    for (std::uint32_t small = 0; small < (1u << m); ++small) {
      for (std::uint32_t big = small;; big = (big + 1) | small) {
        std::vector<std::size_t> s, tset;
        for (std::size_t i = 0; i < m; ++i) {
          if (small >> i & 1) s.push_back(i);
          if (big >> i & 1) tset.push_back(i);
        }
        CHECK(ri.inst.value(s) <= ri.inst.value(tset) + 1e-12);
        SelectionState ss(ri.inst), st(ri.inst);
        for (auto p : s) ss.add(p);
        for (auto p : tset) st.add(p);
        for (std::size_t u = 0; u < m; ++u) {
          if (big >> u & 1) continue;
          CHECK(ss.marginal_gain(u) >= st.marginal_gain(u) - 1e-12);
        }
        if (big == (1u << m) - 1) break;
      }
    }
  }
}

TEST_CASE("properties: determinism and feasibility of result sets") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto ri = t::random_instance(rng, 12, 10, 0.5);
    const auto g = t::graph_for_instance(ri.inst);
    const ObjectiveSpec spec{0.5, ObjectiveKind::attribute_coverage};
    CHECK(gacd(ri.cand, g, 5, spec) == gacd(ri.cand, g, 5, spec));
    CHECK(grdacd(ri.cand, g, 5, spec, 0.3) == grdacd(ri.cand, g, 5, spec, 0.3));
    const auto res = gacd(ri.cand, g, 5, spec);
    std::vector<NodeId> sorted = res.nodes;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (NodeId u : res.nodes) CHECK(ri.cand.position_of(u).has_value());
  }
}
