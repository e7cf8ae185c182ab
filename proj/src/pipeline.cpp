#include "divsearch/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <optional>
#include <stdexcept>

#include "text_util.hpp"

namespace divsearch {

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"panther", "gacd", "grdacd", "ep1", "ep2", "rdep1", "rdep2"};
  return names;
}

bool algorithm_needs_r(const std::string& name) {
  return name == "grdacd" || name == "rdep1" || name == "rdep2";
}

bool algorithm_needs_lambda(const std::string& name) { return name != "panther"; }

ResultSet run_algorithm(const std::string& name, const CandidateSet& cand, const AttributedGraph& g, std::size_t k,
                        std::optional<double> lambda, std::optional<double> r) {
  if (std::find(algorithm_names().begin(), algorithm_names().end(), name) == algorithm_names().end()) {
    throw std::invalid_argument("unknown algorithm '" + name + "'");
  }
  if (algorithm_needs_lambda(name) && !lambda) throw std::invalid_argument("--lambda is required for " + name);
  if (algorithm_needs_r(name) && !r) throw std::invalid_argument("--r is required for " + name);
  if (name == "panther") return top_k_relevance(cand, g, k, lambda.value_or(0.0));
  if (name == "gacd") return gacd(cand, g, k, {*lambda, ObjectiveKind::attribute_coverage});
  if (name == "grdacd") return grdacd(cand, g, k, {*lambda, ObjectiveKind::attribute_coverage}, *r);
  const int hops = name.back() == '1' ? 1 : 2;
  return ep(cand, g, k, *lambda, hops, algorithm_needs_r(name) ? r : std::nullopt);
}

NodeId max_degree_node(const AttributedGraph& g) {
  NodeId best = 0;
  for (NodeId u = 1; u < g.node_count(); ++u) {
    if (g.degree(u) > g.degree(best)) best = u;
  }
  return best;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  if (config.sizes.empty()) throw std::invalid_argument("no sizes given");
  if (config.ks.empty()) throw std::invalid_argument("no k values given");
  if (config.seeds.empty()) throw std::invalid_argument("no seeds given");
  for (std::size_t i = 1; i < config.sizes.size(); ++i) {
    if (config.sizes[i] <= config.sizes[i - 1]) throw std::invalid_argument("sizes must be strictly ascending");
  }
  for (const auto& name : config.algorithms) {
    if (std::find(algorithm_names().begin(), algorithm_names().end(), name) == algorithm_names().end()) {
      throw std::invalid_argument("unknown algorithm '" + name + "'");
    }
    if (algorithm_needs_lambda(name) && !config.lambda) throw std::invalid_argument("--lambda is required for " + name);
    if (algorithm_needs_r(name) && !config.r) throw std::invalid_argument("--r is required for " + name);
  }

  std::vector<BenchRow> rows;
  for (std::size_t n : config.sizes) {
    for (std::uint64_t seed : config.seeds) {
      ErParams er;
      er.node_count = n;
      er.edge_probability = n > 1 ? std::min(1.0, config.avg_degree / static_cast<double>(n - 1)) : 0.0;
      er.attribute_universe = config.attr_universe;
      er.attributes_per_node = config.attrs_per_node;
      er.seed = seed;
      const AttributedGraph g = generate_er(er);

      SamplingParams sampling = config.sampling;
      sampling.seed = seed;
      const std::size_t reps = std::max<std::size_t>(1, config.reps);
      std::optional<PathIndex> index;
      double index_seconds = -1.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        index.reset();
        const auto start = Clock::now();
        index = PathIndex::build(g, sampling, config.threads);
        const double t = seconds_since(start);
        if (index_seconds < 0.0 || t < index_seconds) index_seconds = t;
      }

      const NodeId query = max_degree_node(g);
      std::optional<CandidateSet> cand;
      double candidate_seconds = -1.0;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        cand.reset();
        const auto start = Clock::now();
        cand = build_candidate_set(g, *index, query, config.candidates);
        const double t = seconds_since(start);
        if (candidate_seconds < 0.0 || t < candidate_seconds) candidate_seconds = t;
      }

      for (std::size_t k : config.ks) {
        for (const auto& name : config.algorithms) {
          BenchRow row;
          row.n = n;
          row.edges = g.edge_count();
          row.k = k;
          row.algorithm = name;
          row.seed = seed;
          row.index_seconds = index_seconds;
          row.candidate_seconds = candidate_seconds;
          row.select_seconds = -1.0;
          for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto start = Clock::now();
            const ResultSet result = run_algorithm(name, *cand, g, k, config.lambda, config.r);
            const double t = seconds_since(start);
            if (row.select_seconds < 0.0 || t < row.select_seconds) row.select_seconds = t;
            row.objective = result.objective;
            row.result_size = result.nodes.size();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

void write_bench_tsv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << "n\tedges\tk\talgo\tseed\tindex_time\tcand_time\tselect_time\twall_time\tobjective\tsize\n";
  char buf[32];
  auto fixed = [&](double seconds) {
    std::snprintf(buf, sizeof(buf), "%.6f", seconds);
    return std::string(buf);
  };
  for (const auto& row : rows) {
    out << row.n << '\t' << row.edges << '\t' << row.k << '\t' << row.algorithm << '\t' << row.seed << '\t'
        << fixed(row.index_seconds) << '\t' << fixed(row.candidate_seconds) << '\t' << fixed(row.select_seconds)
        << '\t' << fixed(row.wall_seconds()) << '\t' << detail::format_double(row.objective) << '\t'
        << row.result_size << '\n';
  }
}

}  // namespace divsearch
