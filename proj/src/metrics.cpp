#include "divsearch/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace divsearch {

namespace {

std::vector<std::size_t> positions_of(std::span<const NodeId> nodes, const CandidateSet& cand) {
  std::vector<std::size_t> out;
  out.reserve(nodes.size());
  for (NodeId u : nodes) {
    auto pos = cand.position_of(u);
    if (!pos) throw std::invalid_argument("node " + std::to_string(u) + " is not in the candidate set");
    out.push_back(*pos);
  }
  return out;
}

}  // namespace

double normalized_relevance(std::span<const NodeId> nodes, const CandidateSet& cand,
                            std::vector<std::string>& warnings) {
  const auto positions = positions_of(nodes, cand);
  // Summing in ascending position order makes the value independent of the
  // result order and gives exactly 1 for the top-|S| list itself.
  auto sorted = positions;
  std::sort(sorted.begin(), sorted.end());
  double num = 0.0;
  for (std::size_t pos : sorted) num += cand[pos].relevance;
  double den = 0.0;
  for (std::size_t i = 0; i < std::min(nodes.size(), cand.size()); ++i) den += cand[i].relevance;
  if (den == 0.0) {
    warnings.push_back("normalized relevance undefined (zero top-k relevance); reported as 0");
    return 0.0;
  }
  return num / den;
}

double density(const AttributedGraph& g, std::span<const NodeId> nodes, std::vector<std::string>& warnings) {
  std::vector<NodeId> s(nodes.begin(), nodes.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.size() < 2) {
    warnings.push_back("density undefined for fewer than 2 nodes; reported as 0");
    return 0.0;
  }
  std::size_t edges = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= g.node_count()) throw std::invalid_argument("density: node out of range");
    for (std::size_t j = i + 1; j < s.size(); ++j) edges += g.has_edge(s[i], s[j]);
  }
  const double pairs = static_cast<double>(s.size()) * static_cast<double>(s.size() - 1) / 2.0;
  return static_cast<double>(edges) / pairs;
}

double attribute_coverage_ratio(const AttributedGraph& g, std::span<const NodeId> nodes,
                                std::vector<std::string>& warnings) {
  if (g.attribute_universe_size() == 0) {
    warnings.push_back("attribute universe is empty; ACR reported as 0");
    return 0.0;
  }
  std::vector<AttributeId> covered;
  for (NodeId u : nodes) {
    if (u >= g.node_count()) throw std::invalid_argument("attribute_coverage_ratio: node out of range");
    auto attrs = g.attributes(u);
    covered.insert(covered.end(), attrs.begin(), attrs.end());
  }
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
  return static_cast<double>(covered.size()) / static_cast<double>(g.attribute_universe_size());
}

double min_dissimilarity(std::span<const NodeId> nodes, const CandidateSet& cand, std::vector<std::string>& warnings) {
  if (nodes.size() < 2) {
    warnings.push_back("minimum dissimilarity undefined for fewer than 2 nodes; reported as 1");
    return 1.0;
  }
  const auto positions = positions_of(nodes, cand);
  double best = 1.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t j = i + 1; j < positions.size(); ++j) best = std::min(best, cand.diss(positions[i], positions[j]));
  }
  return best;
}

EvalReport evaluate(const ResultSet& result, const CandidateSet& cand, const AttributedGraph& g) {
  if (result.query != cand.query()) throw std::invalid_argument("result and candidate set belong to different queries");
  EvalReport report;
  report.k_effective = result.nodes.size();
  if (result.nodes.empty()) {
    report.warnings.push_back("empty result");
    report.rel = 0.0;
  } else {
    report.rel = normalized_relevance(result.nodes, cand, report.warnings);
  }
  report.density = density(g, result.nodes, report.warnings);
  report.acr = attribute_coverage_ratio(g, result.nodes, report.warnings);
  report.min_diss = min_dissimilarity(result.nodes, cand, report.warnings);
  return report;
}

}  // namespace divsearch
