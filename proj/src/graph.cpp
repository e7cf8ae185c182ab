#include "divsearch/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "divsearch/rng.hpp"
#include "text_util.hpp"

namespace divsearch {

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& reason)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + reason), file_(file), line_(line) {}

AttributedGraph AttributedGraph::from_edges(std::size_t node_count, std::span<const WeightedEdge> edges,
                                            std::vector<std::vector<AttributeId>> attributes,
                                            std::size_t attribute_universe_size,
                                            std::vector<std::string> labels) {
  if (node_count > std::numeric_limits<NodeId>::max()) {
    throw std::invalid_argument("node count exceeds the NodeId range");
  }
  std::vector<WeightedEdge> normalized;
  normalized.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count) {
      throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.u) + "-" +
                                  std::to_string(e.v));
    }
    if (e.u == e.v) throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw std::invalid_argument("edge weight must be positive and finite");
    }
    normalized.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.weight});
  }
  std::sort(normalized.begin(), normalized.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<WeightedEdge> unique;
  unique.reserve(normalized.size());
  for (const auto& e : normalized) {
    if (!unique.empty() && unique.back().u == e.u && unique.back().v == e.v) {
      if (unique.back().weight != e.weight) {
        throw std::invalid_argument("conflicting weights for edge " + std::to_string(e.u) + "-" +
                                    std::to_string(e.v));
      }
      continue;
    }
    unique.push_back(e);
  }

  AttributedGraph g;
  g.offsets_.assign(node_count + 1, 0);
  for (const auto& e : unique) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < node_count; ++i) g.offsets_[i + 1] += g.offsets_[i];
  g.neighbors_.resize(2 * unique.size());
  g.weights_.resize(2 * unique.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Edges are sorted by (u, v). Filling the smaller-id side first and then
  // the larger-id side leaves every neighbor list sorted.
  for (const auto& e : unique) {
    g.neighbors_[cursor[e.v]] = e.u;
    g.weights_[cursor[e.v]++] = e.weight;
  }
  for (const auto& e : unique) {
    g.neighbors_[cursor[e.u]] = e.v;
    g.weights_[cursor[e.u]++] = e.weight;
  }
  for (std::size_t u = 0; u < node_count; ++u) {
    g.max_degree_ = std::max(g.max_degree_, g.offsets_[u + 1] - g.offsets_[u]);
  }
  g.unweighted_ = std::all_of(unique.begin(), unique.end(), [](const WeightedEdge& e) { return e.weight == 1.0; });

  if (attributes.size() > node_count) throw std::invalid_argument("attribute lists exceed node count");
  attributes.resize(node_count);
  AttributeId max_attr = 0;
  bool any_attr = false;
  g.attribute_offsets_.assign(node_count + 1, 0);
  for (std::size_t u = 0; u < node_count; ++u) {
    auto& list = attributes[u];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (!list.empty()) {
      any_attr = true;
      max_attr = std::max(max_attr, list.back());
    }
    g.attribute_offsets_[u + 1] = g.attribute_offsets_[u] + list.size();
  }
  if (attribute_universe_size == 0) {
    attribute_universe_size = any_attr ? static_cast<std::size_t>(max_attr) + 1 : 0;
  } else if (any_attr && max_attr >= attribute_universe_size) {
    throw std::invalid_argument("attribute id " + std::to_string(max_attr) + " outside universe of size " +
                                std::to_string(attribute_universe_size));
  }
  g.attribute_universe_size_ = attribute_universe_size;
  g.attribute_ids_.reserve(g.attribute_offsets_.back());
  for (const auto& list : attributes) g.attribute_ids_.insert(g.attribute_ids_.end(), list.begin(), list.end());

  if (!labels.empty()) {
    if (labels.size() != node_count) throw std::invalid_argument("label count does not match node count");
    g.label_index_.reserve(labels.size());
    for (std::size_t u = 0; u < labels.size(); ++u) {
      if (!g.label_index_.emplace(labels[u], static_cast<NodeId>(u)).second) {
        throw std::invalid_argument("duplicate node label '" + labels[u] + "'");
      }
    }
    g.labels_ = std::move(labels);
  }
  return g;
}

std::vector<NodeId> AttributedGraph::neighborhood(NodeId u, bool closed) const {
  auto adj = neighbors(u);
  std::vector<NodeId> out(adj.begin(), adj.end());
  if (closed) out.insert(std::lower_bound(out.begin(), out.end(), u), u);
  return out;
}

bool AttributedGraph::has_edge(NodeId u, NodeId v) const {
  auto adj = neighbors(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::optional<double> AttributedGraph::edge_weight(NodeId u, NodeId v) const {
  auto adj = neighbors(u);
  auto it = std::lower_bound(adj.begin(), adj.end(), v);
  if (it == adj.end() || *it != v) return std::nullopt;
  return weights(u)[static_cast<std::size_t>(it - adj.begin())];
}

std::string AttributedGraph::label(NodeId u) const {
  return labels_.empty() ? std::to_string(u) : labels_[u];
}

std::optional<NodeId> AttributedGraph::find_label(const std::string& label) const {
  if (labels_.empty()) {
    NodeId id = 0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), id);
    if (ec != std::errc{} || ptr != label.data() + label.size() || id >= node_count()) return std::nullopt;
    return id;
  }
  auto it = label_index_.find(label);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

GraphStats AttributedGraph::stats() const {
  return {node_count(), edge_count(), attribute_universe_size_, max_degree_};
}

std::vector<WeightedEdge> AttributedGraph::edge_list() const {
  std::vector<WeightedEdge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    auto adj = neighbors(u);
    auto w = weights(u);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (u < adj[i]) out.push_back({u, adj[i], w[i]});
    }
  }
  return out;
}

std::string AttributedGraph::check_invariants() const {
  std::size_t recount_max = 0;
  for (NodeId u = 0; u < node_count(); ++u) {
    auto adj = neighbors(u);
    auto w = weights(u);
    recount_max = std::max(recount_max, adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (adj[i] >= node_count()) return "neighbor out of range at node " + std::to_string(u);
      if (adj[i] == u) return "self-loop at node " + std::to_string(u);
      if (i > 0 && adj[i - 1] >= adj[i]) return "unsorted or duplicate neighbor at node " + std::to_string(u);
      if (!(w[i] > 0.0)) return "non-positive weight at node " + std::to_string(u);
      auto back = edge_weight(adj[i], u);
      if (!back || *back != w[i]) {
        return "asymmetric edge " + std::to_string(u) + "-" + std::to_string(adj[i]);
      }
    }
    for (AttributeId a : attributes(u)) {
      if (a >= attribute_universe_size_) return "attribute outside universe at node " + std::to_string(u);
    }
  }
  if (recount_max != max_degree_) return "cached max degree disagrees with recount";
  return {};
}

bool AttributedGraph::operator==(const AttributedGraph& other) const {
  return offsets_ == other.offsets_ && neighbors_ == other.neighbors_ && weights_ == other.weights_ &&
         attribute_offsets_ == other.attribute_offsets_ && attribute_ids_ == other.attribute_ids_ &&
         attribute_universe_size_ == other.attribute_universe_size_ && labels_ == other.labels_;
}

namespace {

class LabelTable {
 public:
  NodeId intern(const std::string& label) {
    auto [it, inserted] = index_.emplace(label, static_cast<NodeId>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  std::vector<std::string> release() { return std::move(labels_); }

 private:
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::string> labels_;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

AttributedGraph load_graph(const std::filesystem::path& edge_path,
                           const std::optional<std::filesystem::path>& attr_path) {
  LabelTable table;
  std::vector<WeightedEdge> edges;
  std::unordered_map<std::uint64_t, double> seen;
  const std::string edge_name = edge_path.string();
  {
    auto in = open_input(edge_path);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string_view> tokens;
    while (std::getline(in, line)) {
      ++line_no;
      detail::split_ws(line, tokens);
      if (tokens.empty() || tokens[0].front() == '#') continue;
      if (tokens.size() != 2 && tokens.size() != 3) {
        throw ParseError(edge_name, line_no, "expected '<u> <v> [<w>]', got " + std::to_string(tokens.size()) +
                                                 " fields");
      }
      double weight = 1.0;
      if (tokens.size() == 3) {
        auto parsed = detail::parse_double(tokens[2]);
        if (!parsed || !(*parsed > 0.0) || !std::isfinite(*parsed)) {
          throw ParseError(edge_name, line_no, "invalid edge weight '" + std::string(tokens[2]) + "'");
        }
        weight = *parsed;
      }
      const NodeId u = table.intern(std::string(tokens[0]));
      const NodeId v = table.intern(std::string(tokens[1]));
      if (u == v) continue;
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(u, v)) << 32) | std::max(u, v);
      auto [it, inserted] = seen.emplace(key, weight);
      if (!inserted) {
        if (it->second != weight) {
          throw ParseError(edge_name, line_no, "conflicting weight for duplicate edge " + std::string(tokens[0]) +
                                                   " " + std::string(tokens[1]));
        }
        continue;
      }
      edges.push_back({u, v, weight});
    }
  }

  std::vector<std::vector<AttributeId>> attributes;
  std::size_t universe = 0;
  if (attr_path) {
    const std::string attr_name = attr_path->string();
    auto in = open_input(*attr_path);
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    std::vector<std::string_view> tokens;
    while (std::getline(in, line)) {
      ++line_no;
      detail::split_ws(line, tokens);
      if (tokens.empty()) continue;
      if (tokens[0] == "#universe") {
        if (seen_data || universe != 0) throw ParseError(attr_name, line_no, "#universe must be the first line");
        std::uint64_t n = 0;
        if (tokens.size() != 2 || !detail::parse_uint(tokens[1], n) || n == 0) {
          throw ParseError(attr_name, line_no, "expected '#universe <N>' with N >= 1");
        }
        universe = n;
        continue;
      }
      if (tokens[0].front() == '#') continue;
      seen_data = true;
      const NodeId u = table.intern(std::string(tokens[0]));
      if (attributes.size() <= u) attributes.resize(u + 1);
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        std::uint64_t a = 0;
        if (!detail::parse_uint(tokens[i], a) || a > std::numeric_limits<AttributeId>::max()) {
          throw ParseError(attr_name, line_no, "invalid attribute id '" + std::string(tokens[i]) + "'");
        }
        if (universe != 0 && a >= universe) {
          throw ParseError(attr_name, line_no, "attribute id " + std::to_string(a) + " outside #universe " +
                                                   std::to_string(universe));
        }
        attributes[u].push_back(static_cast<AttributeId>(a));
      }
    }
  }

  auto labels = table.release();
  const std::size_t n = labels.size();
  return AttributedGraph::from_edges(n, edges, std::move(attributes), universe, std::move(labels));
}

void write_label_map(const AttributedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (NodeId u = 0; u < g.node_count(); ++u) out << u << '\t' << g.label(u) << '\n';
}

void write_edge_file(const AttributedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : g.edge_list()) {
    out << g.label(e.u) << ' ' << g.label(e.v);
    if (!g.unweighted()) out << ' ' << detail::format_double(e.weight);
    out << '\n';
  }
}

void write_attribute_file(const AttributedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  if (g.attribute_universe_size() > 0) out << "#universe " << g.attribute_universe_size() << '\n';
  for (NodeId u = 0; u < g.node_count(); ++u) {
    out << g.label(u);
    for (AttributeId a : g.attributes(u)) out << ' ' << a;
    out << '\n';
  }
}

InducedSubgraph induced_subgraph(const AttributedGraph& g, std::span<const NodeId> keep) {
  InducedSubgraph result;
  result.original_ids.assign(keep.begin(), keep.end());
  std::sort(result.original_ids.begin(), result.original_ids.end());
  result.original_ids.erase(std::unique(result.original_ids.begin(), result.original_ids.end()),
                            result.original_ids.end());
  std::vector<NodeId> remap(g.node_count(), std::numeric_limits<NodeId>::max());
  for (std::size_t i = 0; i < result.original_ids.size(); ++i) {
    if (result.original_ids[i] >= g.node_count()) throw std::invalid_argument("induced_subgraph: node out of range");
    remap[result.original_ids[i]] = static_cast<NodeId>(i);
  }
  std::vector<WeightedEdge> edges;
  std::vector<std::vector<AttributeId>> attributes(result.original_ids.size());
  std::vector<std::string> labels;
  if (!g.labels().empty()) labels.reserve(result.original_ids.size());
  for (std::size_t i = 0; i < result.original_ids.size(); ++i) {
    const NodeId old = result.original_ids[i];
    auto adj = g.neighbors(old);
    auto w = g.weights(old);
    for (std::size_t j = 0; j < adj.size(); ++j) {
      if (old < adj[j] && remap[adj[j]] != std::numeric_limits<NodeId>::max()) {
        edges.push_back({static_cast<NodeId>(i), remap[adj[j]], w[j]});
      }
    }
    auto attrs = g.attributes(old);
    attributes[i].assign(attrs.begin(), attrs.end());
    if (!g.labels().empty()) labels.push_back(g.labels()[old]);
  }
  result.graph = AttributedGraph::from_edges(result.original_ids.size(), edges, std::move(attributes),
                                             g.attribute_universe_size(), std::move(labels));
  return result;
}

AttributedGraph generate_er(const ErParams& params) {
  const std::size_t n = params.node_count;
  const double p = params.edge_probability;
  if (n == 0) throw std::invalid_argument("generate_er: node count must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_er: edge probability must lie in [0, 1]");
  if (params.attributes_per_node > params.attribute_universe) {
    throw std::invalid_argument("generate_er: attributes per node exceed the attribute universe");
  }

  std::vector<WeightedEdge> edges;
  Rng edge_rng(mix_seed(params.seed, 0));
  if (p == 1.0) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId u = 0; u < v; ++u) edges.push_back({u, v, 1.0});
  } else if (p > 0.0 && n <= 10000) {
    for (NodeId v = 1; v < n; ++v)
      for (NodeId u = 0; u < v; ++u)
        if (edge_rng.uniform01() < p) edges.push_back({u, v, 1.0});
  } else if (p > 0.0) {
    // Batagelj & Brandes: walk the lower triangle in (v, w) order, jumping
    // over geometrically distributed runs of absent pairs.
    const double log_q = std::log1p(-p);
    std::int64_t v = 1;
    std::int64_t w = -1;
    const auto nn = static_cast<std::int64_t>(n);
    while (v < nn) {
      const double r = edge_rng.uniform01();
      w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-r) / log_q));
      while (w >= v && v < nn) {
        w -= v;
        ++v;
      }
      if (v < nn) edges.push_back({static_cast<NodeId>(w), static_cast<NodeId>(v), 1.0});
    }
  }

  std::vector<std::vector<AttributeId>> attributes(n);
  const std::size_t universe = params.attribute_universe;
  const std::size_t per_node = params.attributes_per_node;
  if (per_node > 0) {
    Rng attr_rng(mix_seed(params.seed, 1));
    std::unordered_set<AttributeId> chosen;
    for (auto& list : attributes) {
      // Floyd's sampling without replacement.
      chosen.clear();
      for (std::size_t j = universe - per_node; j < universe; ++j) {
        const auto t = static_cast<AttributeId>(attr_rng.below(j + 1));
        if (!chosen.insert(t).second) chosen.insert(static_cast<AttributeId>(j));
      }
      list.assign(chosen.begin(), chosen.end());
      std::sort(list.begin(), list.end());
    }
  }
  return AttributedGraph::from_edges(n, edges, std::move(attributes), universe);
}

}  // namespace divsearch
