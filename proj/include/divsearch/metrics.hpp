#pragma once

#include <span>
#include <string>
#include <vector>

#include "divsearch/diversify.hpp"
#include "divsearch/graph.hpp"
#include "divsearch/pathsim.hpp"

namespace divsearch {

struct EvalReport {
  double rel = 0.0;
  double density = 0.0;
  double acr = 0.0;
  double min_diss = 1.0;
  std::size_t k_effective = 0;
  std::vector<std::string> warnings;
};

// Degenerate inputs never throw: each metric returns its documented
// sentinel and appends a message to `warnings`.

/// Sum of relevance over the result divided by the sum over the top-|S|
/// candidates. 0 when that denominator is 0. Throws std::invalid_argument if
/// a node is not a candidate.
double normalized_relevance(std::span<const NodeId> nodes, const CandidateSet& cand,
                            std::vector<std::string>& warnings);

/// |E(G[S])| / (|S| (|S| - 1) / 2); 0 when |S| < 2.
double density(const AttributedGraph& g, std::span<const NodeId> nodes, std::vector<std::string>& warnings);

/// |union of A_v| / |A|; 0 when the universe is empty.
double attribute_coverage_ratio(const AttributedGraph& g, std::span<const NodeId> nodes,
                                std::vector<std::string>& warnings);

/// Minimum pairwise dissimilarity; 1 when |S| < 2.
double min_dissimilarity(std::span<const NodeId> nodes, const CandidateSet& cand, std::vector<std::string>& warnings);

EvalReport evaluate(const ResultSet& result, const CandidateSet& cand, const AttributedGraph& g);

}  // namespace divsearch
