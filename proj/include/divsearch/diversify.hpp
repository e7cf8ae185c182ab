#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divsearch/graph.hpp"
#include "divsearch/pathsim.hpp"

namespace divsearch {

enum class ObjectiveKind { attribute_coverage, expansion_1, expansion_2 };

struct ObjectiveSpec {
  double lambda = 0.0;
  ObjectiveKind kind = ObjectiveKind::attribute_coverage;
};

/// f(S) = (1 - lambda) * sum_{u in S} relevance(u) + lambda * |union of sets(S)| / universe_size,
/// over candidate positions 0..size()-1. Every set holds sorted, distinct ids
/// below universe_size. A zero universe makes the coverage term vanish.
struct CoverageInstance {
  std::vector<NodeId> nodes;
  std::vector<double> relevance;
  std::vector<std::vector<std::uint32_t>> sets;
  std::size_t universe_size = 0;
  double lambda = 0.0;

  std::size_t size() const { return nodes.size(); }
  /// f over an arbitrary subset of positions, computed from scratch.
  double value(std::span<const std::size_t> chosen) const;
  /// Throws std::invalid_argument if the fields disagree in size, lambda is
  /// outside [0, 1], or a set element is outside the universe.
  void validate() const;
};

/// Candidate sets keyed by node attributes.
CoverageInstance make_attribute_instance(const CandidateSet& cand, const AttributedGraph& g, double lambda);

/// Candidate sets keyed by l-hop closed neighborhoods. The universe is the
/// union of those sets over all candidates, renumbered densely.
CoverageInstance make_expansion_instance(const CandidateSet& cand, const AttributedGraph& g, double lambda,
                                         int hops);

/// S, its covered elements, and the running objective.
class SelectionState {
 public:
  explicit SelectionState(const CoverageInstance& instance);

  /// f_u(S) = (1 - lambda) * s(u) + lambda * |set(u) \ covered| / universe.
  double marginal_gain(std::size_t pos) const;
  void add(std::size_t pos);

  bool contains(std::size_t pos) const { return in_set_[pos] != 0; }
  const std::vector<std::size_t>& chosen() const { return chosen_; }
  std::size_t covered_count() const { return covered_count_; }
  double relevance_sum() const { return relevance_sum_; }
  double objective_value() const;

 private:
  const CoverageInstance* instance_;
  std::vector<std::size_t> chosen_;
  std::vector<std::uint8_t> in_set_;
  std::vector<std::uint8_t> covered_;
  std::size_t covered_count_ = 0;
  double relevance_sum_ = 0.0;
};

/// Conflict graph over candidate positions: an edge joins i and j when
/// diss(i, j) < r.
struct DissimilarityGraph {
  std::vector<std::vector<std::uint32_t>> adjacency;
  std::size_t edge_count = 0;
  std::size_t max_degree = 0;
  double r = 0.0;

  std::size_t size() const { return adjacency.size(); }
};

DissimilarityGraph build_dissimilarity_graph(const CandidateSet& cand, double r);

struct GreedyOutcome {
  /// Selected candidate positions in selection order.
  std::vector<std::size_t> positions;
  double objective = 0.0;
  /// Final local maximal factor (constrained greedy only).
  std::size_t rho = 1;
};

/// Plain greedy: take the maximum marginal gain each round. Ties go to the
/// higher relevance, then the lower node id. Stops at k or when the
/// candidates run out.
GreedyOutcome greedy_select(const CoverageInstance& instance, std::size_t k);

/// Local-maximal greedy on the conflict graph. Each round picks the
/// maximum-gain node u with gain(u) >= (1/rho) * sum of gains of its
/// surviving conflict neighbors, raising rho by one while no node
/// qualifies, then removes u and its surviving neighbors. The selected nodes
/// are pairwise non-adjacent in `conflicts`.
GreedyOutcome constrained_greedy_select(const CoverageInstance& instance, const DissimilarityGraph& conflicts,
                                        std::size_t k);

struct ResultSet {
  NodeId query = 0;
  std::string algorithm;
  std::size_t k = 0;
  double lambda = 0.0;
  std::optional<double> r;
  std::uint64_t seed = 0;
  std::size_t candidate_limit = 0;
  std::vector<NodeId> nodes;
  double objective = 0.0;
  std::optional<std::size_t> rho_used;
  /// Maximum degree of the conflict graph, when one was built.
  std::optional<std::size_t> conflict_max_degree;
  std::vector<std::string> warnings;

  bool operator==(const ResultSet&) const = default;
};

/// Greedy ACD (or the EP objective when spec.kind is an expansion kind).
ResultSet gacd(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, const ObjectiveSpec& spec);

/// Greedy r-DACD: every pair in the result has diss >= r. Returns a partial
/// result with a warning when the conflict graph runs out of nodes.
ResultSet grdacd(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, const ObjectiveSpec& spec,
                 double r);

/// Union of the l-hop closed neighborhoods of S (l = 1 or 2), sorted.
std::vector<NodeId> expansion_set(const AttributedGraph& g, std::span<const NodeId> nodes, int hops);

/// Neighbor-expansion baselines EP1/EP2, or r-DEP1/r-DEP2 when r is given.
ResultSet ep(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, double lambda, int hops,
             std::optional<double> r = std::nullopt);

/// The k most relevant candidates (plain top-k). The objective reported is
/// f under the attribute-coverage objective with the given lambda.
ResultSet top_k_relevance(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, double lambda = 0.0);

}  // namespace divsearch
