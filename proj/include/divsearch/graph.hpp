#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace divsearch {

using NodeId = std::uint32_t;
using AttributeId = std::uint32_t;

/// Raised by the file loaders. what() carries "<file>:<line>: <reason>".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& reason);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

struct GraphStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t attribute_universe_size = 0;
  std::size_t max_degree = 0;

  bool operator==(const GraphStats&) const = default;
};

struct WeightedEdge {
  NodeId u;
  NodeId v;
  double weight = 1.0;
};

/// Undirected weighted graph with a categorical attribute set per node.
/// Adjacency and attributes are stored in CSR form; each neighbor list and
/// each attribute list is sorted ascending. Immutable once built.
class AttributedGraph {
 public:
  AttributedGraph() = default;

  /// Builds from an undirected edge list. Edges may be listed in either
  /// orientation; a pair listed twice must carry the same weight. Throws
  /// std::invalid_argument on self-loops, non-positive weights, out of range
  /// ids, conflicting duplicates, or attributes outside the universe.
  static AttributedGraph from_edges(std::size_t node_count, std::span<const WeightedEdge> edges,
                                    std::vector<std::vector<AttributeId>> attributes = {},
                                    std::size_t attribute_universe_size = 0,
                                    std::vector<std::string> labels = {});

  std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  std::size_t attribute_universe_size() const { return attribute_universe_size_; }
  std::size_t max_degree() const { return max_degree_; }
  bool unweighted() const { return unweighted_; }

  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {neighbors_.data() + offsets_[u], degree(u)};
  }
  std::span<const double> weights(NodeId u) const { return {weights_.data() + offsets_[u], degree(u)}; }
  std::span<const AttributeId> attributes(NodeId u) const {
    return {attribute_ids_.data() + attribute_offsets_[u],
            attribute_offsets_[u + 1] - attribute_offsets_[u]};
  }

  /// N(u), or N+(u) = N(u) ∪ {u} when closed. Sorted ascending.
  std::vector<NodeId> neighborhood(NodeId u, bool closed) const;

  bool has_edge(NodeId u, NodeId v) const;
  std::optional<double> edge_weight(NodeId u, NodeId v) const;

  /// External label of a node. Falls back to the decimal id when the graph
  /// was built without labels.
  std::string label(NodeId u) const;
  std::optional<NodeId> find_label(const std::string& label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  GraphStats stats() const;

  /// Undirected edge list with u < v, sorted.
  std::vector<WeightedEdge> edge_list() const;

  /// Full scan of the structural invariants. Returns an empty string when
  /// they hold, otherwise a description of the first violation.
  std::string check_invariants() const;

  bool operator==(const AttributedGraph& other) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<double> weights_;
  std::vector<std::size_t> attribute_offsets_;
  std::vector<AttributeId> attribute_ids_;
  std::size_t attribute_universe_size_ = 0;
  std::size_t max_degree_ = 0;
  bool unweighted_ = true;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
};

/// Reads an edge file and an optional attribute file.
///
/// Edge lines are `<u> <v> [<w>]`; attribute lines are `<node> <attr>...`
/// with an optional leading `#universe <N>` line. Other `#` lines and blank
/// lines are ignored. Node labels are arbitrary tokens and receive dense
/// ids in order of first appearance (edge file first). Self-loop lines are
/// skipped. Throws ParseError on malformed input and std::runtime_error when
/// a file cannot be opened.
AttributedGraph load_graph(const std::filesystem::path& edge_path,
                           const std::optional<std::filesystem::path>& attr_path = std::nullopt);

/// Writes `<internal_id>\t<label>` lines.
void write_label_map(const AttributedGraph& g, const std::filesystem::path& path);

/// Writes the graph back out in the loader's formats. Weights are omitted
/// when they are all 1; the attribute file always carries a `#universe`
/// header.
void write_edge_file(const AttributedGraph& g, const std::filesystem::path& path);
void write_attribute_file(const AttributedGraph& g, const std::filesystem::path& path);

struct InducedSubgraph {
  AttributedGraph graph;
  /// original_ids[new_id] = id in the parent graph; ascending.
  std::vector<NodeId> original_ids;
};

/// G[keep]. Nodes are re-indexed in ascending order of their original ids;
/// duplicates in `keep` are ignored. Labels and the attribute universe are
/// carried over.
InducedSubgraph induced_subgraph(const AttributedGraph& g, std::span<const NodeId> keep);

struct ErParams {
  std::size_t node_count = 0;
  double edge_probability = 0.0;
  std::size_t attribute_universe = 0;
  std::size_t attributes_per_node = 0;
  std::uint64_t seed = 0;
};

/// Gilbert G(n, p) graph with uniformly sampled attribute sets. Uses a
/// Bernoulli draw per pair for n <= 10^4 and geometric skipping above.
/// Throws std::invalid_argument on n = 0, p outside [0, 1], or more
/// attributes per node than the universe holds.
AttributedGraph generate_er(const ErParams& params);

}  // namespace divsearch
