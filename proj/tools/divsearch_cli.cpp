// divsearch: diversified top-k similar-node search from the command line.
//
//   divsearch index    --edges E [--attrs A] --out IDX [--T 5] [--R N | --epsilon e] [--seed s]
//   divsearch query    --index IDX --query LABEL --k K --algo NAME [--lambda l] [--r r] ...
//   divsearch eval     --result RES.json (--index IDX | --cand-file C.tsv --edges E [--attrs A])
//   divsearch generate --n N (--p p | --avg-degree d) --out PREFIX ...
//   divsearch bench    --sizes n1,n2,... --algo a,b --lambda l ...
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "divsearch/graph.hpp"
#include "divsearch/io.hpp"
#include "divsearch/metrics.hpp"
#include "divsearch/pathsim.hpp"
#include "divsearch/pipeline.hpp"

namespace fs = std::filesystem;
using namespace divsearch;

namespace {

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SamplingFlags {
  std::size_t T = 5;
  std::optional<std::size_t> R;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());

  void add_to(CLI::App& cmd) {
    cmd.add_option("--T", T, "Steps per random path")->capture_default_str()->check(CLI::Range(1, 254));
    auto* r = cmd.add_option("--R", R, "Number of sampled paths")->check(CLI::PositiveNumber);
    cmd.add_option("--epsilon", epsilon, "Error bound used to derive R (default sqrt(1/|E|))")->excludes(r);
    cmd.add_option("--seed", seed, "Master seed")->capture_default_str();
    add_threads(cmd);
  }
  void add_threads(CLI::App& cmd) {
    cmd.add_option("--threads", threads, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  }
  SamplingParams params() const {
    SamplingParams p;
    p.path_length = T;
    p.num_paths = R;
    p.epsilon = epsilon;
    p.seed = seed;
    return p;
  }
};

void emit(const std::optional<std::string>& out, const std::string& text) {
  if (out) {
    write_text_file(*out, text);
  } else {
    std::cout << text;
  }
}

std::string stats_text(const GraphStats& s, std::size_t paths, const std::string& format) {
  std::ostringstream o;
  if (format == "json") {
    o << "{\"nodes\": " << s.node_count << ", \"edges\": " << s.edge_count
      << ", \"attributes\": " << s.attribute_universe_size << ", \"max_degree\": " << s.max_degree
      << ", \"paths\": " << paths << "}\n";
  } else {
    o << "nodes\tedges\tattributes\tmax_degree\tpaths\n"
      << s.node_count << '\t' << s.edge_count << '\t' << s.attribute_universe_size << '\t' << s.max_degree << '\t'
      << paths << '\n';
  }
  return o.str();
}

IndexBundle build_bundle(const std::string& edges, const std::optional<std::string>& attrs,
                         const SamplingFlags& sampling) {
  IndexBundle bundle;
  bundle.graph = load_graph(edges, attrs ? std::optional<fs::path>(*attrs) : std::nullopt);
  bundle.paths = PathIndex::build(bundle.graph, sampling.params(), sampling.threads);
  return bundle;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T value{};
    if constexpr (std::is_same_v<T, std::string>) {
      value = item;
    } else if (!(is >> value) || !is.eof()) {
      throw InputError(std::string("invalid value '") + item + "' in " + flag);
    }
    out.push_back(value);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversified top-k similar-node search in attributed networks"};
  app.require_subcommand(1);
  app.allow_extras(false);

  // index
  auto* index_cmd = app.add_subcommand("index", "Sample random paths and write an index file");
  std::string idx_edges;
  std::optional<std::string> idx_attrs, idx_labels;
  std::string idx_out;
  std::string idx_format = "json";
  SamplingFlags idx_sampling;
  index_cmd->add_option("--edges", idx_edges, "Edge file")->required();
  index_cmd->add_option("--attrs", idx_attrs, "Attribute file");
  index_cmd->add_option("--out", idx_out, "Index file to write")->required();
  index_cmd->add_option("--labels-out", idx_labels, "Write the label map as TSV");
  index_cmd->add_option("--format", idx_format, "Stats format")->check(CLI::IsMember({"json", "tsv"}));
  idx_sampling.add_to(*index_cmd);

  // query
  auto* query_cmd = app.add_subcommand("query", "Run a diversified search for one query node");
  std::string q_index, q_label, q_algo;
  std::optional<std::string> q_edges, q_attrs, q_out, q_cand_out;
  std::size_t q_k = 0, q_candidates = 2000;
  std::optional<double> q_lambda, q_r;
  std::string q_format = "json";
  bool q_reindex = false;
  SamplingFlags q_sampling;
  query_cmd->add_option("--index", q_index, "Index file (built from --edges if missing or with --reindex)")
      ->required();
  query_cmd->add_option("--edges", q_edges, "Edge file, used only when (re)building the index");
  query_cmd->add_option("--attrs", q_attrs, "Attribute file, used only when (re)building the index");
  query_cmd->add_flag("--reindex", q_reindex, "Resample paths even if the index exists");
  query_cmd->add_option("--query", q_label, "Query node label")->required();
  query_cmd->add_option("--k", q_k, "Result size")->required()->check(CLI::PositiveNumber);
  query_cmd->add_option("--algo", q_algo, "Algorithm")->required()->check(CLI::IsMember(algorithm_names()));
  query_cmd->add_option("--lambda", q_lambda, "Relevance/diversity trade-off in [0, 1]")->check(CLI::Range(0.0, 1.0));
  query_cmd->add_option("--r", q_r, "Dissimilarity threshold");
  query_cmd->add_option("--candidates", q_candidates, "Candidate set size")->capture_default_str()->check(
      CLI::PositiveNumber);
  query_cmd->add_option("--out", q_out, "Output file (stdout if absent)");
  query_cmd->add_option("--cand-out", q_cand_out, "Also write the candidate set as TSV");
  query_cmd->add_option("--format", q_format, "Output format")->check(CLI::IsMember({"json", "tsv"}));
  q_sampling.add_to(*query_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Compute Rel, density, ACR and MinDiss for a result");
  std::string e_result;
  std::optional<std::string> e_index, e_cand, e_edges, e_attrs, e_out;
  std::string e_format = "json";
  eval_cmd->add_option("--result", e_result, "Result JSON from 'query'")->required();
  eval_cmd->add_option("--index", e_index, "Index file (graph and paths)");
  eval_cmd->add_option("--cand-file", e_cand, "Candidate TSV from 'query --cand-out'");
  eval_cmd->add_option("--edges", e_edges, "Edge file (with --cand-file, when no index is given)");
  eval_cmd->add_option("--attrs", e_attrs, "Attribute file");
  eval_cmd->add_option("--format", e_format, "Output format")->check(CLI::IsMember({"json", "tsv"}));
  eval_cmd->add_option("--out", e_out, "Output file (stdout if absent)");

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Write an Erdos-Renyi attributed graph");
  std::size_t g_n = 0, g_attrs = 0, g_per_node = 0;
  std::optional<double> g_p, g_avg;
  std::uint64_t g_seed = 0;
  std::string g_out;
  gen_cmd->add_option("--n", g_n, "Node count")->required();
  auto* p_opt = gen_cmd->add_option("--p", g_p, "Edge probability")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--avg-degree", g_avg, "Expected degree (sets p = d / (n - 1))")->excludes(p_opt);
  gen_cmd->add_option("--attrs", g_attrs, "Attribute universe size")->capture_default_str();
  gen_cmd->add_option("--attrs-per-node", g_per_node, "Attributes per node")->capture_default_str();
  gen_cmd->add_option("--seed", g_seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--out", g_out, "Output prefix; writes PREFIX.edges and PREFIX.attrs")->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Scalability benchmark on ER graphs");
  std::string b_sizes, b_ks = "20", b_algos, b_seeds = "0";
  BenchConfig bench;
  std::optional<std::string> b_out;
  SamplingFlags b_sampling;
  b_sampling.threads = 1;
  bench_cmd->add_option("--sizes", b_sizes, "Comma-separated ascending node counts")->required();
  bench_cmd->add_option("--avg-degree", bench.avg_degree, "Expected degree")->capture_default_str();
  bench_cmd->add_option("--attrs", bench.attr_universe, "Attribute universe size")->capture_default_str();
  bench_cmd->add_option("--attrs-per-node", bench.attrs_per_node, "Attributes per node")->capture_default_str();
  bench_cmd->add_option("--k", b_ks, "Comma-separated result sizes")->capture_default_str();
  bench_cmd->add_option("--algo", b_algos, "Comma-separated algorithms")->required();
  bench_cmd->add_option("--seeds", b_seeds, "Comma-separated seeds")->capture_default_str();
  bench_cmd->add_option("--lambda", bench.lambda, "Trade-off in [0, 1]")->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--r", bench.r, "Dissimilarity threshold");
  bench_cmd->add_option("--candidates", bench.candidates, "Candidate set size")->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Timing repetitions per selection")->capture_default_str();
  bench_cmd->add_option("--out", b_out, "Output TSV (stdout if absent)");
  bench_cmd->add_option("--T", b_sampling.T, "Steps per random path")->capture_default_str()->check(CLI::Range(1, 254));
  auto* b_r = bench_cmd->add_option("--R", b_sampling.R, "Number of sampled paths")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--epsilon", b_sampling.epsilon, "Error bound used to derive R")->excludes(b_r);
  b_sampling.add_threads(*bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*index_cmd) {
      const IndexBundle bundle = build_bundle(idx_edges, idx_attrs, idx_sampling);
      save_index(bundle, idx_out);
      if (idx_labels) write_label_map(bundle.graph, *idx_labels);
      std::cout << stats_text(bundle.graph.stats(), bundle.paths.num_paths(), idx_format);
      if (!idx_attrs) std::cerr << "warning: no attribute file; ACR will be reported as 0\n";
    } else if (*query_cmd) {
      if (algorithm_needs_lambda(q_algo) && !q_lambda) throw InputError("--lambda is required for " + q_algo);
      if (algorithm_needs_r(q_algo) && !q_r) throw InputError("--r is required for " + q_algo);
      IndexBundle bundle;
      if (q_reindex || !fs::exists(q_index)) {
        if (!q_edges) throw InputError("index " + q_index + " not found; pass --edges to build it");
        bundle = build_bundle(*q_edges, q_attrs, q_sampling);
        save_index(bundle, q_index);
      } else {
        bundle = load_index(q_index);
      }
      const auto query = bundle.graph.find_label(q_label);
      if (!query) throw InputError("unknown query label '" + q_label + "'");
      const CandidateSet cand = build_candidate_set(bundle.graph, bundle.paths, *query, q_candidates);
      if (q_cand_out) cand.write_tsv(fs::path(*q_cand_out));
      ResultSet result = run_algorithm(q_algo, cand, bundle.graph, q_k, q_lambda, q_r);
      result.seed = bundle.paths.seed();
      result.candidate_limit = q_candidates;
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      emit(q_out, q_format == "json" ? result_to_json(result, bundle.graph) : result_to_tsv(result, bundle.graph));
    } else if (*eval_cmd) {
      IndexBundle bundle;
      if (e_index) {
        bundle = load_index(*e_index);
      } else if (e_edges) {
        bundle.graph = load_graph(*e_edges, e_attrs ? std::optional<fs::path>(*e_attrs) : std::nullopt);
      } else {
        throw InputError("eval needs --index or --edges for the graph");
      }
      const ResultSet result = result_from_json(read_text_file(e_result), bundle.graph);
      CandidateSet cand;
      if (e_cand) {
        cand = CandidateSet::read_tsv(fs::path(*e_cand));
      } else if (e_index) {
        if (result.candidate_limit == 0) throw InputError("result has no candidate limit; pass --cand-file");
        cand = build_candidate_set(bundle.graph, bundle.paths, result.query, result.candidate_limit);
      } else {
        throw InputError("eval needs --cand-file or --index for the candidate set");
      }
      if (cand.query() != result.query) throw InputError("query mismatch between result and candidate set");
      const EvalReport report = evaluate(result, cand, bundle.graph);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      emit(e_out, e_format == "json" ? report_to_json(report) : report_to_tsv(report, true));
    } else if (*gen_cmd) {
      ErParams er;
      er.node_count = g_n;
      if (g_avg) {
        er.edge_probability = g_n > 1 ? std::min(1.0, *g_avg / static_cast<double>(g_n - 1)) : 0.0;
      } else if (g_p) {
        er.edge_probability = *g_p;
      } else {
        throw InputError("generate needs --p or --avg-degree");
      }
      er.attribute_universe = g_attrs;
      er.attributes_per_node = g_per_node;
      er.seed = g_seed;
      const AttributedGraph g = generate_er(er);
      write_edge_file(g, g_out + ".edges");
      write_attribute_file(g, g_out + ".attrs");
      std::cout << stats_text(g.stats(), 0, "json");
    } else if (*bench_cmd) {
      bench.sizes = parse_list<std::size_t>(b_sizes, "--sizes");
      bench.ks = parse_list<std::size_t>(b_ks, "--k");
      bench.algorithms = parse_list<std::string>(b_algos, "--algo");
      bench.seeds = parse_list<std::uint64_t>(b_seeds, "--seeds");
      bench.sampling = b_sampling.params();
      bench.threads = b_sampling.threads;
      std::ostringstream out;
      write_bench_tsv(run_bench(bench), out);
      emit(b_out, out.str());
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
