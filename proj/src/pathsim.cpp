#include "divsearch/pathsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include "divsearch/rng.hpp"
#include "text_util.hpp"

namespace divsearch {

double path_count_constant(std::size_t path_length) {
  return 0.5 * (std::log2(static_cast<double>(path_length)) + 1.0);
}

std::size_t resolve_num_paths(const SamplingParams& params, std::size_t edge_count) {
  if (params.path_length == 0) throw std::invalid_argument("path length T must be at least 1");
  if (params.num_paths) {
    if (*params.num_paths == 0) throw std::invalid_argument("number of paths R must be at least 1");
    return *params.num_paths;
  }
  double eps = 0.0;
  if (params.epsilon) {
    eps = *params.epsilon;
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("epsilon must be positive");
  } else {
    if (edge_count == 0) {
      throw std::invalid_argument("cannot derive R from epsilon = sqrt(1/|E|) on a graph without edges; set R");
    }
    eps = std::sqrt(1.0 / static_cast<double>(edge_count));
  }
  const double r = std::ceil(path_count_constant(params.path_length) / (eps * eps));
  if (r > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw std::invalid_argument("derived R exceeds 2^32 paths; raise epsilon");
  }
  return std::max<std::size_t>(1, static_cast<std::size_t>(r));
}

namespace {

struct WalkTables {
  // Cumulative edge weights per adjacency slot; empty for unweighted graphs.
  std::vector<double> cumulative;
};

WalkTables make_walk_tables(const AttributedGraph& g) {
  WalkTables t;
  if (g.unweighted()) return t;
  for (NodeId u = 0; u < g.node_count(); ++u) {
    double acc = 0.0;
    for (double w : g.weights(u)) {
      acc += w;
      t.cumulative.push_back(acc);
    }
  }
  return t;
}

constexpr std::size_t kBatch = 16;

// Walks paths first .. first + count - 1 (count <= kBatch) in lockstep, so
// the neighbor lookups of different walks overlap in memory. Path i writes
// its distinct nodes to out + (i - first) * slots and its length to lens.
void walk_batch(const AttributedGraph& g, const WalkTables& tables, std::span<const std::size_t> offsets,
                std::size_t steps, std::uint64_t seed, std::size_t first, std::size_t count, NodeId* out,
                std::uint8_t* lens) {
  const std::size_t slots = steps + 1;
  std::vector<Rng> rngs;
  rngs.reserve(count);
  NodeId cur[kBatch];
  bool live[kBatch];
  for (std::size_t b = 0; b < count; ++b) {
    rngs.emplace_back(mix_seed(seed, first + b));
    cur[b] = static_cast<NodeId>(rngs[b].below(g.node_count()));
    out[b * slots] = cur[b];
    lens[b] = 1;
    live[b] = true;
  }
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t b = 0; b < count; ++b) {
      if (!live[b]) continue;
      auto adj = g.neighbors(cur[b]);
      if (adj.empty()) {
        live[b] = false;
        continue;
      }
      std::size_t pick = 0;
      if (tables.cumulative.empty()) {
        pick = rngs[b].below(adj.size());
      } else {
        const double* cum = tables.cumulative.data() + offsets[cur[b]];
        const double x = rngs[b].uniform01() * cum[adj.size() - 1];
        pick = static_cast<std::size_t>(std::upper_bound(cum, cum + adj.size(), x) - cum);
        pick = std::min(pick, adj.size() - 1);
      }
      cur[b] = adj[pick];
      NodeId* path = out + b * slots;
      if (std::find(path, path + lens[b], cur[b]) == path + lens[b]) path[lens[b]++] = cur[b];
    }
  }
}

}  // namespace

PathIndex PathIndex::build(const AttributedGraph& g, const SamplingParams& params, unsigned threads) {
  if (g.node_count() == 0) throw std::invalid_argument("cannot sample paths on an empty graph");
  const std::size_t steps = params.path_length;
  const std::size_t paths = resolve_num_paths(params, g.edge_count());
  if (steps > 254) throw std::invalid_argument("path length T must be below 255");
  const std::size_t slots = steps + 1;

  std::vector<std::size_t> offsets(g.node_count() + 1, 0);
  for (NodeId u = 0; u < g.node_count(); ++u) offsets[u + 1] = offsets[u] + g.degree(u);
  const WalkTables tables = make_walk_tables(g);

  // Each worker appends its walks, in path order, to its own compact buffer.
  struct Chunk {
    std::vector<NodeId> nodes;
    std::vector<std::uint8_t> lengths;
  };
  auto run = [&](std::size_t begin, std::size_t end, Chunk& out) {
    out.nodes.reserve((end - begin) * slots);
    out.lengths.reserve(end - begin);
    NodeId buf[kBatch * 256];
    std::uint8_t lens[kBatch];
    for (std::size_t i = begin; i < end; i += kBatch) {
      const std::size_t count = std::min(kBatch, end - i);
      walk_batch(g, tables, offsets, steps, params.seed, i, count, buf, lens);
      for (std::size_t b = 0; b < count; ++b) {
        out.nodes.insert(out.nodes.end(), buf + b * slots, buf + b * slots + lens[b]);
        out.lengths.push_back(lens[b]);
      }
    }
  };

  threads = std::max(1u, threads);
  if (threads > 1 && paths < 4096) threads = 1;
  std::vector<Chunk> chunks(threads);
  const std::size_t per = (paths + threads - 1) / threads;
  if (threads == 1) {
    run(0, paths, chunks[0]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min(paths, t * per);
      const std::size_t end = std::min(paths, begin + per);
      pool.emplace_back(run, begin, end, std::ref(chunks[t]));
    }
    for (auto& th : pool) th.join();
  }

  PathIndex index;
  index.path_length_ = steps;
  index.seed_ = params.seed;
  index.path_offsets_.assign(paths + 1, 0);
  std::size_t i = 0;
  for (const auto& c : chunks) {
    for (std::uint8_t len : c.lengths) {
      index.path_offsets_[i + 1] = index.path_offsets_[i] + len;
      ++i;
    }
  }
  if (threads == 1) {
    index.path_nodes_ = std::move(chunks[0].nodes);
  } else {
    index.path_nodes_.reserve(index.path_offsets_.back());
    for (auto& c : chunks) {
      index.path_nodes_.insert(index.path_nodes_.end(), c.nodes.begin(), c.nodes.end());
      c = {};
    }
  }
  index.build_node_lists(g.node_count());
  return index;
}

PathIndex PathIndex::from_paths(std::size_t node_count, std::size_t path_length, std::uint64_t seed,
                                std::vector<std::size_t> path_offsets, std::vector<NodeId> path_nodes) {
  if (path_offsets.empty() || path_offsets.front() != 0 || path_offsets.back() != path_nodes.size()) {
    throw std::invalid_argument("path offsets do not describe the node array");
  }
  for (std::size_t i = 0; i + 1 < path_offsets.size(); ++i) {
    const std::size_t b = path_offsets[i];
    const std::size_t e = path_offsets[i + 1];
    if (e < b || e - b > path_length + 1 || e == b) throw std::invalid_argument("path " + std::to_string(i) + " has invalid length");
    for (std::size_t j = b; j < e; ++j) {
      if (path_nodes[j] >= node_count) throw std::invalid_argument("path node out of range");
      if (std::find(path_nodes.begin() + static_cast<std::ptrdiff_t>(b),
                    path_nodes.begin() + static_cast<std::ptrdiff_t>(j), path_nodes[j]) !=
          path_nodes.begin() + static_cast<std::ptrdiff_t>(j)) {
        throw std::invalid_argument("path " + std::to_string(i) + " repeats a node");
      }
    }
  }
  PathIndex index;
  index.path_length_ = path_length;
  index.seed_ = seed;
  index.path_offsets_ = std::move(path_offsets);
  index.path_nodes_ = std::move(path_nodes);
  index.build_node_lists(node_count);
  return index;
}

void PathIndex::build_node_lists(std::size_t node_count) {
  node_offsets_.assign(node_count + 1, 0);
  for (NodeId u : path_nodes_) ++node_offsets_[u + 1];
  for (std::size_t u = 0; u < node_count; ++u) node_offsets_[u + 1] += node_offsets_[u];
  node_paths_.resize(path_nodes_.size());
  std::vector<std::size_t> cursor(node_offsets_.begin(), node_offsets_.end() - 1);
  // Paths are scanned in id order, so every node list comes out ascending.
  for (std::size_t i = 0; i + 1 < path_offsets_.size(); ++i) {
    for (std::size_t j = path_offsets_[i]; j < path_offsets_[i + 1]; ++j) {
      node_paths_[cursor[path_nodes_[j]]++] = static_cast<std::uint32_t>(i);
    }
  }
}

std::size_t PathIndex::co_occurrence(NodeId u, NodeId v) const {
  auto a = paths_of(u);
  auto b = paths_of(v);
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

double relevance(const PathIndex& index, NodeId q, NodeId u) {
  if (index.num_paths() == 0) return 0.0;
  return static_cast<double>(index.co_occurrence(q, u)) / static_cast<double>(index.num_paths());
}

double dissimilarity(std::size_t co_count, std::size_t p_max, std::size_t p_min) {
  if (p_max == p_min) return co_count == 0 ? 1.0 : 0.0;
  const double num = static_cast<double>(co_count) - static_cast<double>(p_min);
  const double den = static_cast<double>(p_max) - static_cast<double>(p_min);
  return std::clamp(1.0 - num / den, 0.0, 1.0);
}

double dissimilarity(const PathIndex& index, NodeId u, NodeId v, std::size_t p_max, std::size_t p_min) {
  return dissimilarity(index.co_occurrence(u, v), p_max, p_min);
}

CandidateSet::CandidateSet(NodeId query, std::size_t num_paths, std::vector<Candidate> members,
                           std::vector<double> diss, std::size_t p_max, std::size_t p_min)
    : query_(query), num_paths_(num_paths), members_(std::move(members)), diss_(std::move(diss)),
      p_max_(p_max), p_min_(p_min) {
  const std::size_t m = members_.size();
  if (diss_.size() != (m < 2 ? 0 : m * (m - 1) / 2)) {
    throw std::invalid_argument("dissimilarity matrix size does not match member count");
  }
  if (p_max_ < p_min_) throw std::invalid_argument("p_max must not be below p_min");
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = members_[i];
    if (c.node == query_) throw std::invalid_argument("query node listed as a candidate");
    if (!(c.relevance >= 0.0 && c.relevance <= 1.0)) throw std::invalid_argument("relevance outside [0, 1]");
    if (i > 0) {
      const auto& prev = members_[i - 1];
      const bool ordered = prev.relevance > c.relevance || (prev.relevance == c.relevance && prev.node < c.node);
      if (!ordered) throw std::invalid_argument("candidates not sorted by relevance, then node id");
    }
  }
  std::vector<NodeId> nodes;
  nodes.reserve(m);
  for (const auto& c : members_) nodes.push_back(c.node);
  std::sort(nodes.begin(), nodes.end());
  if (std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw std::invalid_argument("duplicate candidate node");
  }
  for (double d : diss_) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("dissimilarity outside [0, 1]");
  }
}

CandidateSet CandidateSet::from_matrix(NodeId query, std::vector<Candidate> members,
                                       const std::vector<std::vector<double>>& diss, std::size_t num_paths,
                                       std::size_t p_max, std::size_t p_min) {
  const std::size_t m = members.size();
  if (diss.size() != m) throw std::invalid_argument("dissimilarity matrix has wrong row count");
  std::vector<double> packed;
  packed.reserve(m < 2 ? 0 : m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i) {
    if (diss[i].size() != m) throw std::invalid_argument("dissimilarity matrix is not square");
    for (std::size_t j = i + 1; j < m; ++j) packed.push_back(diss[i][j]);
  }
  return CandidateSet(query, num_paths, std::move(members), std::move(packed), p_max, p_min);
}

std::optional<std::size_t> CandidateSet::position_of(NodeId u) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].node == u) return i;
  }
  return std::nullopt;
}

void CandidateSet::write_tsv(std::ostream& out) const {
  out << "#query " << query_ << " #R " << num_paths_ << " #pmax " << p_max_ << " #pmin " << p_min_ << '\n';
  for (const auto& c : members_) out << c.node << '\t' << detail::format_double(c.relevance) << '\n';
  out << "#diss\n";
  const std::size_t m = members_.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) out << i << '\t' << j << '\t' << detail::format_double(diss(i, j)) << '\n';
  }
}

void CandidateSet::write_tsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_tsv(out);
}

CandidateSet CandidateSet::read_tsv(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> tokens;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      detail::split_ws(line, tokens);
      if (!tokens.empty()) return true;
    }
    return false;
  };
  auto need_uint = [&](std::string_view tok) {
    std::uint64_t v = 0;
    if (!detail::parse_uint(tok, v)) throw ParseError(name, line_no, "expected an integer, got '" + std::string(tok) + "'");
    return v;
  };
  if (!next() || tokens.size() != 8 || tokens[0] != "#query" || tokens[2] != "#R" || tokens[4] != "#pmax" ||
      tokens[6] != "#pmin") {
    throw ParseError(name, line_no, "expected header '#query <id> #R <R> #pmax <v> #pmin <v>'");
  }
  const auto query = static_cast<NodeId>(need_uint(tokens[1]));
  const std::size_t num_paths = need_uint(tokens[3]);
  const std::size_t p_max = need_uint(tokens[5]);
  const std::size_t p_min = need_uint(tokens[7]);

  std::vector<Candidate> members;
  bool in_diss = false;
  while (next()) {
    if (tokens[0] == "#diss") {
      in_diss = true;
      break;
    }
    if (tokens.size() != 2) throw ParseError(name, line_no, "expected '<node> <relevance>'");
    auto rel = detail::parse_double(tokens[1]);
    if (!rel) throw ParseError(name, line_no, "invalid relevance '" + std::string(tokens[1]) + "'");
    members.push_back({static_cast<NodeId>(need_uint(tokens[0])), *rel});
  }
  if (!in_diss) throw ParseError(name, line_no, "missing #diss section");
  const std::size_t m = members.size();
  std::vector<double> packed(m < 2 ? 0 : m * (m - 1) / 2, -1.0);
  std::size_t filled = 0;
  while (next()) {
    if (tokens.size() != 3) throw ParseError(name, line_no, "expected '<i> <j> <value>'");
    const std::size_t i = need_uint(tokens[0]);
    const std::size_t j = need_uint(tokens[1]);
    auto value = detail::parse_double(tokens[2]);
    if (!value || i >= j || j >= m) throw ParseError(name, line_no, "invalid dissimilarity entry");
    double& slot = packed[i * m - i * (i + 1) / 2 + (j - i - 1)];
    if (slot >= 0.0) throw ParseError(name, line_no, "duplicate dissimilarity entry");
    slot = *value;
    ++filled;
  }
  if (filled != packed.size()) throw ParseError(name, line_no, "dissimilarity section is incomplete");
  try {
    return CandidateSet(query, num_paths, std::move(members), std::move(packed), p_max, p_min);
  } catch (const std::invalid_argument& e) {
    throw ParseError(name, line_no, e.what());
  }
}

CandidateSet CandidateSet::read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_tsv(in, path.string());
}

CandidateSet build_candidate_set(const AttributedGraph& g, const PathIndex& index, NodeId q, std::size_t limit) {
  if (limit == 0) throw std::invalid_argument("candidate limit must be at least 1");
  if (q >= g.node_count() || q >= index.node_count()) throw std::invalid_argument("query node out of range");

  std::vector<std::uint32_t> counts(index.node_count(), 0);
  std::vector<NodeId> touched;
  for (std::uint32_t p : index.paths_of(q)) {
    for (NodeId w : index.path(p)) {
      if (w == q) continue;
      if (counts[w]++ == 0) touched.push_back(w);
    }
  }
  std::sort(touched.begin(), touched.end(), [&](NodeId a, NodeId b) {
    return counts[a] != counts[b] ? counts[a] > counts[b] : a < b;
  });
  if (touched.size() > limit) touched.resize(limit);

  const std::size_t m = touched.size();
  const double r = static_cast<double>(index.num_paths());
  std::vector<Candidate> members;
  members.reserve(m);
  for (NodeId u : touched) members.push_back({u, static_cast<double>(counts[u]) / r});

  std::vector<std::int32_t> position(index.node_count(), -1);
  for (std::size_t i = 0; i < m; ++i) position[touched[i]] = static_cast<std::int32_t>(i);
  std::vector<std::uint32_t> pair_counts(m < 2 ? 0 : m * (m - 1) / 2, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t row = i * m - i * (i + 1) / 2;
    for (std::uint32_t p : index.paths_of(touched[i])) {
      for (NodeId w : index.path(p)) {
        const std::int32_t j = position[w];
        if (j > static_cast<std::int32_t>(i)) ++pair_counts[row + static_cast<std::size_t>(j) - i - 1];
      }
    }
  }
  std::size_t p_max = 0;
  std::size_t p_min = 0;
  if (!pair_counts.empty()) {
    auto [lo, hi] = std::minmax_element(pair_counts.begin(), pair_counts.end());
    p_min = *lo;
    p_max = *hi;
  }
  std::vector<double> diss(pair_counts.size());
  for (std::size_t i = 0; i < pair_counts.size(); ++i) diss[i] = dissimilarity(pair_counts[i], p_max, p_min);
  return CandidateSet(q, index.num_paths(), std::move(members), std::move(diss), p_max, p_min);
}

}  // namespace divsearch
