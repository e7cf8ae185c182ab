#pragma once

#include <filesystem>
#include <string>

#include "divsearch/diversify.hpp"
#include "divsearch/graph.hpp"
#include "divsearch/metrics.hpp"
#include "divsearch/pathsim.hpp"

namespace divsearch {

/// A graph together with the paths sampled on it; the unit stored in an
/// index file so that queries never need to resample.
struct IndexBundle {
  AttributedGraph graph;
  PathIndex paths;
};

/// Binary index file (native byte order). Writing the same bundle twice
/// produces identical bytes. load_index throws std::runtime_error on a
/// missing, truncated or inconsistent file.
void save_index(const IndexBundle& bundle, const std::filesystem::path& path);
IndexBundle load_index(const std::filesystem::path& path);

/// ResultSet <-> JSON. Node ids are written as graph labels:
/// {query, algorithm, k, lambda, r, seed, candidates, nodes, objective,
///  rho_used, conflict_max_degree, warnings}. Absent optionals are null.
std::string result_to_json(const ResultSet& result, const AttributedGraph& g);
ResultSet result_from_json(const std::string& text, const AttributedGraph& g);

/// One node label per line, in selection order.
std::string result_to_tsv(const ResultSet& result, const AttributedGraph& g);

std::string report_to_json(const EvalReport& report);
/// `rel density acr min_diss k_effective`, tab separated, with a header
/// line when requested.
std::string report_to_tsv(const EvalReport& report, bool header);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace divsearch
