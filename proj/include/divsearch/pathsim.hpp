#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "divsearch/graph.hpp"

namespace divsearch {

struct SamplingParams {
  /// Steps per walk (T). A path touches at most T + 1 distinct nodes.
  std::size_t path_length = 5;
  /// R. When unset it is derived from `epsilon`, see resolve_num_paths.
  std::optional<std::size_t> num_paths;
  /// Error bound; defaults to sqrt(1 / |E|) when neither R nor epsilon is set.
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
};

/// Constant c in R = ceil(c / epsilon^2): c = 0.5 * (log2(T) + 1).
double path_count_constant(std::size_t path_length);

/// R from the params: explicit num_paths wins, otherwise ceil(c / epsilon^2)
/// with epsilon defaulting to sqrt(1 / edge_count). Throws
/// std::invalid_argument for T = 0, R = 0, epsilon <= 0, or when epsilon must
/// be derived from an edgeless graph.
std::size_t resolve_num_paths(const SamplingParams& params, std::size_t edge_count);

/// Sampled random paths and, for every node, the sorted ids of the paths
/// that visit it. Immutable once built.
class PathIndex {
 public:
  PathIndex() = default;

  /// Samples R paths. Path i starts at a uniform node and takes T steps,
  /// moving to each neighbor with probability proportional to the edge
  /// weight; a walk that reaches a node without neighbors stops there.
  /// Path i draws from Rng(mix_seed(seed, i)), so the result does not depend
  /// on `threads`. Throws std::invalid_argument on an empty graph.
  static PathIndex build(const AttributedGraph& g, const SamplingParams& params, unsigned threads = 1);

  /// Reassembles an index from its per-path node lists (used by the index
  /// file reader). Throws std::invalid_argument when a list is malformed.
  static PathIndex from_paths(std::size_t node_count, std::size_t path_length, std::uint64_t seed,
                              std::vector<std::size_t> path_offsets, std::vector<NodeId> path_nodes);

  std::size_t num_paths() const { return path_offsets_.empty() ? 0 : path_offsets_.size() - 1; }
  std::size_t path_length() const { return path_length_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t node_count() const { return node_offsets_.empty() ? 0 : node_offsets_.size() - 1; }

  /// Distinct nodes of path i, in visiting order.
  std::span<const NodeId> path(std::size_t i) const {
    return {path_nodes_.data() + path_offsets_[i], path_offsets_[i + 1] - path_offsets_[i]};
  }
  /// Ids of the paths containing u, ascending.
  std::span<const std::uint32_t> paths_of(NodeId u) const {
    return {node_paths_.data() + node_offsets_[u], node_offsets_[u + 1] - node_offsets_[u]};
  }

  /// |p_{u,v}|: number of paths containing both u and v.
  std::size_t co_occurrence(NodeId u, NodeId v) const;

  std::size_t total_entries() const { return path_nodes_.size(); }
  const std::vector<std::size_t>& path_offsets() const { return path_offsets_; }
  const std::vector<NodeId>& path_nodes() const { return path_nodes_; }

  bool operator==(const PathIndex& other) const {
    return path_length_ == other.path_length_ && seed_ == other.seed_ && path_offsets_ == other.path_offsets_ &&
           path_nodes_ == other.path_nodes_ && node_offsets_ == other.node_offsets_;
  }

 private:
  void build_node_lists(std::size_t node_count);

  std::size_t path_length_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> path_offsets_;
  std::vector<NodeId> path_nodes_;
  std::vector<std::size_t> node_offsets_;
  std::vector<std::uint32_t> node_paths_;
};

/// s(u) = |p_{u,q}| / R.
double relevance(const PathIndex& index, NodeId q, NodeId u);

/// Min-max normalized dissimilarity from a co-occurrence count, clamped to
/// [0, 1]. When p_max == p_min the score is 1 for a zero count and 0 otherwise.
double dissimilarity(std::size_t co_count, std::size_t p_max, std::size_t p_min);
double dissimilarity(const PathIndex& index, NodeId u, NodeId v, std::size_t p_max, std::size_t p_min);

struct Candidate {
  NodeId node;
  double relevance;

  bool operator==(const Candidate&) const = default;
};

/// Relevance-ranked candidates for one query, with their pairwise
/// dissimilarities. Members are sorted by relevance descending, ties by
/// ascending NodeId; the query itself is never a member.
class CandidateSet {
 public:
  CandidateSet() = default;

  /// `diss` is the packed upper triangle (row-major, i < j) of the member
  /// dissimilarity matrix, m(m-1)/2 entries. Throws std::invalid_argument if
  /// the members are unsorted, contain the query or duplicates, or a value is
  /// outside [0, 1].
  CandidateSet(NodeId query, std::size_t num_paths, std::vector<Candidate> members, std::vector<double> diss,
               std::size_t p_max, std::size_t p_min);

  /// Same, from a full symmetric matrix. Only the upper triangle is read.
  static CandidateSet from_matrix(NodeId query, std::vector<Candidate> members,
                                  const std::vector<std::vector<double>>& diss, std::size_t num_paths = 0,
                                  std::size_t p_max = 0, std::size_t p_min = 0);

  NodeId query() const { return query_; }
  std::size_t num_paths() const { return num_paths_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<Candidate>& members() const { return members_; }
  const Candidate& operator[](std::size_t i) const { return members_[i]; }
  std::size_t p_max() const { return p_max_; }
  std::size_t p_min() const { return p_min_; }

  /// Dissimilarity between members i and j (by position); 0 on the diagonal.
  double diss(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    if (i > j) std::swap(i, j);
    return diss_[i * members_.size() - i * (i + 1) / 2 + (j - i - 1)];
  }
  const std::vector<double>& packed_diss() const { return diss_; }

  /// Position of a node among the members.
  std::optional<std::size_t> position_of(NodeId u) const;

  /// TSV export/import; see README for the layout. Values are written in
  /// shortest round-trip form, so read(write(c)) == c.
  void write_tsv(std::ostream& out) const;
  void write_tsv(const std::filesystem::path& path) const;
  static CandidateSet read_tsv(std::istream& in, const std::string& name = "<stream>");
  static CandidateSet read_tsv(const std::filesystem::path& path);

  bool operator==(const CandidateSet& other) const = default;

 private:
  NodeId query_ = 0;
  std::size_t num_paths_ = 0;
  std::vector<Candidate> members_;
  std::vector<double> diss_;
  std::size_t p_max_ = 0;
  std::size_t p_min_ = 0;
};

/// Ranks every node sharing at least one path with q, keeps the top `limit`,
/// and fills the pairwise dissimilarities with p_max / p_min taken over the
/// member pairs. Throws std::invalid_argument for limit = 0 or an invalid q.
CandidateSet build_candidate_set(const AttributedGraph& g, const PathIndex& index, NodeId q, std::size_t limit);

}  // namespace divsearch
