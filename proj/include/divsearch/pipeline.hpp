#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "divsearch/diversify.hpp"
#include "divsearch/graph.hpp"
#include "divsearch/pathsim.hpp"

namespace divsearch {

/// Names accepted by run_algorithm.
const std::vector<std::string>& algorithm_names();
bool algorithm_needs_r(const std::string& name);
bool algorithm_needs_lambda(const std::string& name);

/// Dispatches by name: panther (plain top-k), gacd, grdacd, ep1, ep2, rdep1,
/// rdep2. Throws std::invalid_argument for unknown names or when a required
/// lambda / r is missing.
ResultSet run_algorithm(const std::string& name, const CandidateSet& cand, const AttributedGraph& g, std::size_t k,
                        std::optional<double> lambda, std::optional<double> r);

/// Highest-degree node, lowest id on ties.
NodeId max_degree_node(const AttributedGraph& g);

struct BenchConfig {
  std::vector<std::size_t> sizes;
  double avg_degree = 10.0;
  std::size_t attr_universe = 1000;
  std::size_t attrs_per_node = 10;
  std::vector<std::size_t> ks{20};
  std::vector<std::string> algorithms;
  std::vector<std::uint64_t> seeds{0};
  std::optional<double> lambda;
  std::optional<double> r;
  SamplingParams sampling;
  std::size_t candidates = 2000;
  /// Each selection is timed this many times; the minimum is reported.
  std::size_t reps = 3;
  unsigned threads = 1;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t edges = 0;
  std::size_t k = 0;
  std::string algorithm;
  std::uint64_t seed = 0;
  double index_seconds = 0.0;
  double candidate_seconds = 0.0;
  double select_seconds = 0.0;
  double objective = 0.0;
  std::size_t result_size = 0;

  double wall_seconds() const { return index_seconds + candidate_seconds + select_seconds; }
};

/// For each size and seed: generate an ER graph with edge probability
/// avg_degree / (n - 1), sample paths, query the highest-degree node, and
/// time every (k, algorithm) pair. Throws std::invalid_argument for an empty
/// algorithm list, empty or non-ascending sizes, or an empty k list.
std::vector<BenchRow> run_bench(const BenchConfig& config);

/// Columns: n edges k algo seed index_time cand_time select_time wall_time
/// objective size. Times are seconds with microsecond resolution.
void write_bench_tsv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace divsearch
