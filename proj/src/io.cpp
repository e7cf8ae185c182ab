#include "divsearch/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include <json.hpp>

#include "text_util.hpp"

namespace divsearch {

namespace {

constexpr char kMagic[8] = {'D', 'I', 'V', 'S', 'I', 'D', 'X', '1'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) fail("truncated");
    return value;
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    if (n > (1u << 20)) fail("label too long");
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    if (!in_) fail("truncated");
    return s;
  }
  std::uint64_t get_count(std::uint64_t limit) {
    const auto n = get<std::uint64_t>();
    if (n > limit) fail("implausible count");
    return n;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw std::runtime_error("corrupt index file " + name_ + ": " + why);
  }
  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::istream& in_;
  std::string name_;
};

constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 40;

}  // namespace

void save_index(const IndexBundle& bundle, const std::filesystem::path& path) {
  const auto& g = bundle.graph;
  const auto& p = bundle.paths;
  if (p.node_count() != g.node_count()) throw std::invalid_argument("index and graph disagree on node count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));

  w.put<std::uint64_t>(g.node_count());
  w.put<std::uint8_t>(g.labels().empty() ? 0 : 1);
  for (const auto& label : g.labels()) w.put_string(label);
  const auto edges = g.edge_list();
  w.put<std::uint64_t>(edges.size());
  for (const auto& e : edges) {
    w.put<std::uint32_t>(e.u);
    w.put<std::uint32_t>(e.v);
    w.put<double>(e.weight);
  }
  w.put<std::uint64_t>(g.attribute_universe_size());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    auto attrs = g.attributes(u);
    w.put<std::uint64_t>(attrs.size());
    for (AttributeId a : attrs) w.put<std::uint32_t>(a);
  }

  w.put<std::uint64_t>(p.path_length());
  w.put<std::uint64_t>(p.seed());
  w.put<std::uint64_t>(p.num_paths());
  for (std::size_t i = 0; i < p.num_paths(); ++i) {
    auto nodes = p.path(i);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(nodes.size()));
    for (NodeId u : nodes) w.put<std::uint32_t>(u);
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

IndexBundle load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Reader r(in, path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) r.fail("bad magic");

  const auto n = r.get_count(std::numeric_limits<NodeId>::max());
  const bool has_labels = r.get<std::uint8_t>() != 0;
  std::vector<std::string> labels;
  if (has_labels) {
    labels.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) labels.push_back(r.get_string());
  }
  const auto m = r.get_count(kMaxCount);
  std::vector<WeightedEdge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    const auto u = r.get<std::uint32_t>();
    const auto v = r.get<std::uint32_t>();
    const auto weight = r.get<double>();
    edges.push_back({u, v, weight});
  }
  const auto universe = r.get_count(kMaxCount);
  std::vector<std::vector<AttributeId>> attributes(n);
  for (auto& list : attributes) {
    const auto count = r.get_count(kMaxCount);
    list.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) list.push_back(r.get<std::uint32_t>());
  }

  IndexBundle bundle;
  try {
    bundle.graph = AttributedGraph::from_edges(n, edges, std::move(attributes), universe, std::move(labels));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }

  const auto path_length = r.get_count(254);
  const auto seed = r.get<std::uint64_t>();
  const auto num_paths = r.get_count(kMaxCount);
  std::vector<std::size_t> offsets(num_paths + 1, 0);
  std::vector<NodeId> nodes;
  for (std::uint64_t i = 0; i < num_paths; ++i) {
    const auto len = r.get<std::uint8_t>();
    for (std::uint8_t j = 0; j < len; ++j) nodes.push_back(r.get<std::uint32_t>());
    offsets[i + 1] = nodes.size();
  }
  if (!r.at_end()) r.fail("trailing bytes");
  try {
    bundle.paths = PathIndex::from_paths(n, path_length, seed, std::move(offsets), std::move(nodes));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }
  return bundle;
}

std::string result_to_json(const ResultSet& result, const AttributedGraph& g) {
  nlohmann::ordered_json j;
  j["query"] = g.label(result.query);
  j["algorithm"] = result.algorithm;
  j["k"] = result.k;
  j["lambda"] = result.lambda;
  j["r"] = result.r ? nlohmann::ordered_json(*result.r) : nlohmann::ordered_json(nullptr);
  j["seed"] = result.seed;
  j["candidates"] = result.candidate_limit;
  auto nodes = nlohmann::ordered_json::array();
  for (NodeId u : result.nodes) nodes.push_back(g.label(u));
  j["nodes"] = std::move(nodes);
  j["objective"] = result.objective;
  j["rho_used"] = result.rho_used ? nlohmann::ordered_json(*result.rho_used) : nlohmann::ordered_json(nullptr);
  j["conflict_max_degree"] = result.conflict_max_degree ? nlohmann::ordered_json(*result.conflict_max_degree)
                                                        : nlohmann::ordered_json(nullptr);
  j["warnings"] = result.warnings;
  return j.dump(2) + "\n";
}

ResultSet result_from_json(const std::string& text, const AttributedGraph& g) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("result JSON: ") + e.what());
  }
  auto lookup = [&](const std::string& label) {
    auto id = g.find_label(label);
    if (!id) throw std::invalid_argument("result JSON names unknown node '" + label + "'");
    return *id;
  };
  try {
    ResultSet result;
    result.query = lookup(j.at("query").get<std::string>());
    result.algorithm = j.at("algorithm").get<std::string>();
    result.k = j.at("k").get<std::size_t>();
    result.lambda = j.at("lambda").get<double>();
    if (!j.at("r").is_null()) result.r = j.at("r").get<double>();
    result.seed = j.at("seed").get<std::uint64_t>();
    result.candidate_limit = j.value("candidates", std::size_t{0});
    for (const auto& label : j.at("nodes")) result.nodes.push_back(lookup(label.get<std::string>()));
    result.objective = j.at("objective").get<double>();
    if (!j.at("rho_used").is_null()) result.rho_used = j.at("rho_used").get<std::size_t>();
    if (j.contains("conflict_max_degree") && !j.at("conflict_max_degree").is_null()) {
      result.conflict_max_degree = j.at("conflict_max_degree").get<std::size_t>();
    }
    result.warnings = j.at("warnings").get<std::vector<std::string>>();
    return result;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("result JSON: ") + e.what());
  }
}

std::string result_to_tsv(const ResultSet& result, const AttributedGraph& g) {
  std::string out;
  for (NodeId u : result.nodes) out += g.label(u) + "\n";
  return out;
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["rel"] = report.rel;
  j["density"] = report.density;
  j["acr"] = report.acr;
  j["min_diss"] = report.min_diss;
  j["k_effective"] = report.k_effective;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string report_to_tsv(const EvalReport& report, bool header) {
  std::ostringstream out;
  if (header) out << "rel\tdensity\tacr\tmin_diss\tk_effective\n";
  out << detail::format_double(report.rel) << '\t' << detail::format_double(report.density) << '\t'
      << detail::format_double(report.acr) << '\t' << detail::format_double(report.min_diss) << '\t'
      << report.k_effective << '\n';
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace divsearch
