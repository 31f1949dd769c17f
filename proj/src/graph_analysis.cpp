#include "pdpk/graph_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <utility>

#include "pdpk/errors.hpp"

namespace pdpk {

EntityGraph EntityGraph::from(const KnowledgeGraph& kg) {
  EntityGraph graph;
  graph.vertices = kg.structural_entities();
  std::map<EntityId, std::size_t> position;
  for (std::size_t i = 0; i < graph.vertices.size(); ++i) position[graph.vertices[i]] = i;
  std::vector<std::set<std::size_t>> neighbours(graph.vertices.size());
  for (const auto& t : kg.structural_triples()) {
    const auto a = position.at(t.head);
    const auto b = position.at(t.tail_entity());
    if (a == b) continue;
    neighbours[a].insert(b);
    neighbours[b].insert(a);
  }
  for (const auto& n : neighbours) graph.adjacency.emplace_back(n.begin(), n.end());
  return graph;
}

std::vector<double> closeness_centrality(const EntityGraph& graph) {
  const std::size_t n = graph.vertices.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  std::vector<std::size_t> distance(n);
  constexpr auto kUnseen = static_cast<std::size_t>(-1);
  for (std::size_t source = 0; source < n; ++source) {
    std::fill(distance.begin(), distance.end(), kUnseen);
    distance[source] = 0;
    std::queue<std::size_t> frontier;
    frontier.push(source);
    std::size_t reachable = 0;
    std::size_t total = 0;
    while (!frontier.empty()) {
      const auto v = frontier.front();
      frontier.pop();
      ++reachable;
      total += distance[v];
      for (auto w : graph.adjacency[v]) {
        if (distance[w] == kUnseen) {
          distance[w] = distance[v] + 1;
          frontier.push(w);
        }
      }
    }
    if (total == 0) continue;
    const double r = static_cast<double>(reachable - 1);
    out[source] = (r / static_cast<double>(total)) * (r / static_cast<double>(n - 1));
  }
  return out;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

}  // namespace

GraphStats compute_stats(const KnowledgeGraph& kg, DegreeCentralityForm form) {
  const auto graph = EntityGraph::from(kg);
  if (graph.vertices.empty()) throw EmptyGraphError("knowledge graph has no entities");
  GraphStats stats;
  stats.edge_count = kg.structural_triples().size();
  stats.vertex_count = graph.vertices.size();
  stats.relation_count = kg.structural_relation_count();

  const double others = static_cast<double>(graph.vertices.size() - 1);
  std::vector<double> degree_centrality, neighbour_degree, degree;
  for (std::size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto deg = static_cast<double>(graph.degree(v));
    degree.push_back(deg);
    if (deg == 0.0) {
      ++stats.isolated_vertices;
      continue;
    }
    degree_centrality.push_back(form == DegreeCentralityForm::reciprocal ? others / deg
                                                                         : deg / others);
    double sum = 0.0;
    for (auto w : graph.adjacency[v]) sum += static_cast<double>(graph.degree(w));
    neighbour_degree.push_back(sum / deg);
  }
  if (others == 0.0) degree_centrality.clear();

  std::tie(stats.closeness_mean, stats.closeness_std) = mean_std(closeness_centrality(graph));
  std::tie(stats.degree_centrality_mean, stats.degree_centrality_std) =
      mean_std(degree_centrality);
  std::tie(stats.avg_neighbour_degree_mean, stats.avg_neighbour_degree_std) =
      mean_std(neighbour_degree);
  std::tie(stats.avg_degree_mean, stats.avg_degree_std) = mean_std(degree);
  return stats;
}

std::size_t BiasReport::flagged_count() const { return flagged().size(); }

std::set<Triple> BiasReport::flagged() const {
  std::set<Triple> all = flagged_b1;
  all.insert(flagged_b2.begin(), flagged_b2.end());
  all.insert(flagged_b3.begin(), flagged_b3.end());
  return all;
}

BiasReport detect_biases(const KnowledgeGraph& kg, BiasThresholds thresholds) {
  BiasReport report;
  report.thresholds = thresholds;
  report.triples = kg.structural_triples();
  const auto& triples = report.triples;

  using Pair = std::pair<EntityId, EntityId>;
  std::map<RelationId, std::size_t> relation_size;
  std::map<std::pair<RelationId, EntityId>, std::size_t> tail_count, head_count;
  std::map<RelationId, std::map<EntityId, std::set<EntityId>>> tails_of, heads_of;
  std::map<RelationId, std::set<Pair>> pairs;
  std::map<Pair, std::set<RelationId>> relations_between;  // unordered pair key
  auto unordered = [](EntityId a, EntityId b) { return a < b ? Pair{a, b} : Pair{b, a}; };

  for (const auto& t : triples) {
    const auto h = t.head, tail = t.tail_entity();
    ++relation_size[t.relation];
    ++tail_count[{t.relation, tail}];
    ++head_count[{t.relation, h}];
    tails_of[t.relation][h].insert(tail);
    heads_of[t.relation][tail].insert(h);
    pairs[t.relation].insert({h, tail});
    relations_between[unordered(h, tail)].insert(t.relation);
  }

  auto max_multiplicity = [](const std::map<EntityId, std::set<EntityId>>& groups) {
    std::size_t best = 0;
    for (const auto& [key, members] : groups) best = std::max(best, members.size());
    return best;
  };
  // Share of groups (heads or tails of r) whose member set contains `value`.
  auto containing_share = [](const std::map<EntityId, std::set<EntityId>>& groups,
                             EntityId value) {
    std::size_t hits = 0;
    for (const auto& [key, members] : groups) hits += members.contains(value);
    return static_cast<double>(hits) / static_cast<double>(groups.size());
  };
  auto overlap = [&](RelationId r, RelationId other) {
    const auto& mine = pairs[r];
    const auto& theirs = pairs[other];
    std::size_t shared = 0;
    for (const auto& [a, b] : mine) {
      shared += theirs.contains({a, b}) || theirs.contains({b, a});
    }
    return static_cast<double>(shared) / static_cast<double>(mine.size());
  };

  for (const auto& t : triples) {
    const auto h = t.head, tail = t.tail_entity();
    const auto size = static_cast<double>(relation_size[t.relation]);
    const double b1 = std::max(static_cast<double>(tail_count[{t.relation, tail}]) / size,
                               static_cast<double>(head_count[{t.relation, h}]) / size);

    double b2 = 0.0;
    if (max_multiplicity(tails_of[t.relation]) > 1) {
      b2 = std::max(b2, containing_share(tails_of[t.relation], tail));
    }
    if (max_multiplicity(heads_of[t.relation]) > 1) {
      b2 = std::max(b2, containing_share(heads_of[t.relation], h));
    }

    double b3 = 0.0;
    for (auto other : relations_between[unordered(h, tail)]) {
      if (other == t.relation) continue;
      const auto& theirs = pairs[other];
      if (!theirs.contains({h, tail}) && !theirs.contains({tail, h})) continue;
      b3 = std::max(b3, overlap(t.relation, other));
    }

    report.b1.push_back(b1);
    report.b2.push_back(b2);
    report.b3.push_back(b3);
    if (b1 > thresholds.type1) report.flagged_b1.insert(t);
    if (b2 > thresholds.type2) report.flagged_b2.insert(t);
    if (b3 > thresholds.type3) report.flagged_b3.insert(t);
  }
  return report;
}

KnowledgeGraph debias(const KnowledgeGraph& kg, BiasThresholds thresholds) {
  const auto flagged = detect_biases(kg, thresholds).flagged();
  std::vector<Triple> kept;
  for (const auto& t : kg.triples()) {
    if (!flagged.contains(t)) kept.push_back(t);
  }
  return kg.with_triples(kept);
}

}  // namespace pdpk
