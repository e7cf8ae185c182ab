#include "divsearch/diversify.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace divsearch {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must lie in [0, 1]");
}

void check_k(std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
}

double coverage_term(double lambda, std::size_t covered, std::size_t universe) {
  if (universe == 0) return 0.0;
  return lambda * static_cast<double>(covered) / static_cast<double>(universe);
}

// True when candidate a should be preferred to b at equal gain.
bool tie_break(const CoverageInstance& inst, std::size_t a, std::size_t b) {
  if (inst.relevance[a] != inst.relevance[b]) return inst.relevance[a] > inst.relevance[b];
  return inst.nodes[a] < inst.nodes[b];
}

bool better(const CoverageInstance& inst, double gain_a, std::size_t a, double gain_b, std::size_t b) {
  if (gain_a != gain_b) return gain_a > gain_b;
  return tie_break(inst, a, b);
}

}  // namespace

double CoverageInstance::value(std::span<const std::size_t> chosen) const {
  double rel = 0.0;
  std::vector<std::uint32_t> covered;
  for (std::size_t pos : chosen) {
    rel += relevance[pos];
    covered.insert(covered.end(), sets[pos].begin(), sets[pos].end());
  }
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
  return (1.0 - lambda) * rel + coverage_term(lambda, covered.size(), universe_size);
}

void CoverageInstance::validate() const {
  check_lambda(lambda);
  if (relevance.size() != nodes.size() || sets.size() != nodes.size()) {
    throw std::invalid_argument("coverage instance fields disagree in size");
  }
  for (const auto& set : sets) {
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (set[i] >= universe_size) throw std::invalid_argument("set element outside the universe");
      if (i > 0 && set[i - 1] >= set[i]) throw std::invalid_argument("set elements must be sorted and distinct");
    }
  }
}

CoverageInstance make_attribute_instance(const CandidateSet& cand, const AttributedGraph& g, double lambda) {
  check_lambda(lambda);
  CoverageInstance inst;
  inst.lambda = lambda;
  inst.universe_size = g.attribute_universe_size();
  for (const auto& c : cand.members()) {
    if (c.node >= g.node_count()) throw std::invalid_argument("candidate node outside the graph");
    inst.nodes.push_back(c.node);
    inst.relevance.push_back(c.relevance);
    auto attrs = g.attributes(c.node);
    inst.sets.emplace_back(attrs.begin(), attrs.end());
  }
  return inst;
}

CoverageInstance make_expansion_instance(const CandidateSet& cand, const AttributedGraph& g, double lambda,
                                         int hops) {
  check_lambda(lambda);
  CoverageInstance inst;
  inst.lambda = lambda;
  std::unordered_map<NodeId, std::uint32_t> dense;
  std::vector<std::vector<NodeId>> raw;
  std::vector<NodeId> universe;
  for (const auto& c : cand.members()) {
    if (c.node >= g.node_count()) throw std::invalid_argument("candidate node outside the graph");
    inst.nodes.push_back(c.node);
    inst.relevance.push_back(c.relevance);
    const NodeId single[] = {c.node};
    raw.push_back(expansion_set(g, single, hops));
    universe.insert(universe.end(), raw.back().begin(), raw.back().end());
  }
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  for (std::size_t i = 0; i < universe.size(); ++i) dense.emplace(universe[i], static_cast<std::uint32_t>(i));
  inst.universe_size = universe.size();
  for (const auto& set : raw) {
    // Dense ids preserve order, so the mapped sets stay sorted.
    std::vector<std::uint32_t> mapped;
    mapped.reserve(set.size());
    for (NodeId v : set) mapped.push_back(dense.at(v));
    inst.sets.push_back(std::move(mapped));
  }
  return inst;
}

SelectionState::SelectionState(const CoverageInstance& instance)
    : instance_(&instance), in_set_(instance.size(), 0), covered_(instance.universe_size, 0) {}

double SelectionState::marginal_gain(std::size_t pos) const {
  std::size_t fresh = 0;
  for (std::uint32_t a : instance_->sets[pos]) fresh += covered_[a] == 0;
  return (1.0 - instance_->lambda) * instance_->relevance[pos] +
         coverage_term(instance_->lambda, fresh, instance_->universe_size);
}

void SelectionState::add(std::size_t pos) {
  if (in_set_[pos]) throw std::logic_error("candidate selected twice");
  in_set_[pos] = 1;
  chosen_.push_back(pos);
  relevance_sum_ += instance_->relevance[pos];
  for (std::uint32_t a : instance_->sets[pos]) {
    if (!covered_[a]) {
      covered_[a] = 1;
      ++covered_count_;
    }
  }
}

double SelectionState::objective_value() const {
  return (1.0 - instance_->lambda) * relevance_sum_ +
         coverage_term(instance_->lambda, covered_count_, instance_->universe_size);
}

DissimilarityGraph build_dissimilarity_graph(const CandidateSet& cand, double r) {
  DissimilarityGraph dg;
  dg.r = r;
  const std::size_t m = cand.size();
  dg.adjacency.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (cand.diss(i, j) < r) {
        dg.adjacency[i].push_back(static_cast<std::uint32_t>(j));
        dg.adjacency[j].push_back(static_cast<std::uint32_t>(i));
        ++dg.edge_count;
      }
    }
  }
  for (const auto& adj : dg.adjacency) dg.max_degree = std::max(dg.max_degree, adj.size());
  return dg;
}

GreedyOutcome greedy_select(const CoverageInstance& instance, std::size_t k) {
  SelectionState state(instance);
  const std::size_t target = std::min(k, instance.size());
  while (state.chosen().size() < target) {
    std::size_t best = instance.size();
    double best_gain = 0.0;
    for (std::size_t u = 0; u < instance.size(); ++u) {
      if (state.contains(u)) continue;
      const double gain = state.marginal_gain(u);
      if (best == instance.size() || better(instance, gain, u, best_gain, best)) {
        best = u;
        best_gain = gain;
      }
    }
    state.add(best);
  }
  return {state.chosen(), state.objective_value(), 1};
}

GreedyOutcome constrained_greedy_select(const CoverageInstance& instance, const DissimilarityGraph& conflicts,
                                        std::size_t k) {
  if (conflicts.size() != instance.size()) throw std::invalid_argument("conflict graph does not match candidates");
  const std::size_t m = instance.size();
  SelectionState state(instance);
  std::vector<std::uint8_t> alive(m, 1);
  std::size_t alive_count = m;
  std::size_t rho = 1;
  std::vector<double> gain(m, 0.0);
  std::vector<double> neighbor_sum(m, 0.0);

  while (state.chosen().size() < k && alive_count > 0) {
    for (std::size_t u = 0; u < m; ++u) {
      if (alive[u]) gain[u] = state.marginal_gain(u);
    }
    for (std::size_t u = 0; u < m; ++u) {
      if (!alive[u]) continue;
      double sum = 0.0;
      for (std::uint32_t w : conflicts.adjacency[u]) {
        if (alive[w]) sum += gain[w];
      }
      neighbor_sum[u] = sum;
    }
    // Gains do not change while rho escalates, so retrying after rho + 1
    // only needs the qualification test, not a fresh gain pass. The relative
    // slack absorbs summation rounding when a node sits exactly on the bound.
    std::size_t best = m;
    for (;; ++rho) {
      const double scale = static_cast<double>(rho);
      for (std::size_t u = 0; u < m; ++u) {
        if (!alive[u]) continue;
        if (scale * gain[u] < neighbor_sum[u] * (1.0 - 1e-12)) continue;
        if (best == m || better(instance, gain[u], u, gain[best], best)) best = u;
      }
      if (best != m) break;
      // The maximum-gain node qualifies once rho reaches its degree.
      if (rho > std::max<std::size_t>(conflicts.max_degree, 1)) {
        throw std::logic_error("no local maximal node within rho <= max degree");
      }
    }
    state.add(best);
    alive[best] = 0;
    --alive_count;
    for (std::uint32_t w : conflicts.adjacency[best]) {
      if (alive[w]) {
        alive[w] = 0;
        --alive_count;
      }
    }
  }
  return {state.chosen(), state.objective_value(), rho};
}

namespace {

ResultSet start_result(const CandidateSet& cand, std::string algorithm, std::size_t k, double lambda) {
  ResultSet result;
  result.query = cand.query();
  result.algorithm = std::move(algorithm);
  result.k = k;
  result.lambda = lambda;
  if (cand.empty()) {
    result.warnings.push_back("empty candidate set");
  } else if (cand.size() < k) {
    result.warnings.push_back("candidate set holds " + std::to_string(cand.size()) + " nodes, fewer than k = " +
                              std::to_string(k));
  }
  return result;
}

CoverageInstance make_instance(const CandidateSet& cand, const AttributedGraph& g, const ObjectiveSpec& spec) {
  switch (spec.kind) {
    case ObjectiveKind::expansion_1:
      return make_expansion_instance(cand, g, spec.lambda, 1);
    case ObjectiveKind::expansion_2:
      return make_expansion_instance(cand, g, spec.lambda, 2);
    case ObjectiveKind::attribute_coverage:
      break;
  }
  return make_attribute_instance(cand, g, spec.lambda);
}

void note_empty_universe(const CoverageInstance& inst, ResultSet& result) {
  if (inst.lambda > 0.0 && inst.universe_size == 0 && !inst.nodes.empty()) {
    result.warnings.push_back("coverage universe is empty; the diversity term is zero");
  }
}

const char* algorithm_name(ObjectiveKind kind, bool constrained) {
  switch (kind) {
    case ObjectiveKind::expansion_1:
      return constrained ? "rdep1" : "ep1";
    case ObjectiveKind::expansion_2:
      return constrained ? "rdep2" : "ep2";
    case ObjectiveKind::attribute_coverage:
      break;
  }
  return constrained ? "grdacd" : "gacd";
}

void fill_nodes(const CoverageInstance& inst, const GreedyOutcome& outcome, ResultSet& result) {
  result.nodes.reserve(outcome.positions.size());
  for (std::size_t pos : outcome.positions) result.nodes.push_back(inst.nodes[pos]);
  result.objective = outcome.objective;
}

}  // namespace

ResultSet gacd(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, const ObjectiveSpec& spec) {
  check_k(k);
  check_lambda(spec.lambda);
  ResultSet result = start_result(cand, algorithm_name(spec.kind, false), k, spec.lambda);
  const CoverageInstance inst = make_instance(cand, g, spec);
  note_empty_universe(inst, result);
  fill_nodes(inst, greedy_select(inst, k), result);
  return result;
}

ResultSet grdacd(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, const ObjectiveSpec& spec,
                 double r) {
  check_k(k);
  check_lambda(spec.lambda);
  ResultSet result = start_result(cand, algorithm_name(spec.kind, true), k, spec.lambda);
  result.r = r;
  const CoverageInstance inst = make_instance(cand, g, spec);
  note_empty_universe(inst, result);
  const DissimilarityGraph conflicts = build_dissimilarity_graph(cand, r);
  const GreedyOutcome outcome = constrained_greedy_select(inst, conflicts, k);
  fill_nodes(inst, outcome, result);
  result.rho_used = outcome.rho;
  result.conflict_max_degree = conflicts.max_degree;
  if (outcome.positions.size() < k && cand.size() >= k) {
    result.warnings.push_back("only " + std::to_string(outcome.positions.size()) +
                              " mutually r-dissimilar candidates fit, fewer than k = " + std::to_string(k));
  }
  return result;
}

std::vector<NodeId> expansion_set(const AttributedGraph& g, std::span<const NodeId> nodes, int hops) {
  if (hops != 1 && hops != 2) throw std::invalid_argument("expansion hops must be 1 or 2");
  std::vector<NodeId> out;
  for (NodeId u : nodes) {
    if (u >= g.node_count()) throw std::invalid_argument("expansion_set: node out of range");
    out.push_back(u);
    for (NodeId v : g.neighbors(u)) {
      out.push_back(v);
      if (hops == 2) {
        auto second = g.neighbors(v);
        out.insert(out.end(), second.begin(), second.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ResultSet ep(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, double lambda, int hops,
             std::optional<double> r) {
  if (hops != 1 && hops != 2) throw std::invalid_argument("expansion hops must be 1 or 2");
  const ObjectiveSpec spec{lambda, hops == 1 ? ObjectiveKind::expansion_1 : ObjectiveKind::expansion_2};
  return r ? grdacd(cand, g, k, spec, *r) : gacd(cand, g, k, spec);
}

ResultSet top_k_relevance(const CandidateSet& cand, const AttributedGraph& g, std::size_t k, double lambda) {
  check_k(k);
  check_lambda(lambda);
  ResultSet result = start_result(cand, "panther", k, lambda);
  const CoverageInstance inst = make_attribute_instance(cand, g, lambda);
  SelectionState state(inst);
  for (std::size_t i = 0; i < std::min(k, cand.size()); ++i) state.add(i);
  fill_nodes(inst, {state.chosen(), state.objective_value(), 1}, result);
  return result;
}

}  // namespace divsearch
