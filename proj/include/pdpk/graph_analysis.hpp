#pragma once

#include <cstddef>
#include <set>
#include <vector>

#include "pdpk/knowledge_graph.hpp"

namespace pdpk {

// (|V|-1)/deg(x) is the reciprocal of the usual normalised degree
// centrality deg(x)/(|V|-1); both are offered.
enum class DegreeCentralityForm { normalised, reciprocal };

struct GraphStats {
  std::size_t edge_count = 0;
  std::size_t vertex_count = 0;
  std::size_t relation_count = 0;
  std::size_t isolated_vertices = 0;  // excluded from degree centrality
  double closeness_mean = 0, closeness_std = 0;
  double degree_centrality_mean = 0, degree_centrality_std = 0;
  double avg_neighbour_degree_mean = 0, avg_neighbour_degree_std = 0;
  double avg_degree_mean = 0, avg_degree_std = 0;
};

// Undirected simple graph over the structural entities of a KG.
struct EntityGraph {
  std::vector<EntityId> vertices;                 // KG ids, ascending
  std::vector<std::vector<std::size_t>> adjacency;  // by vertex position

  static EntityGraph from(const KnowledgeGraph& kg);
  std::size_t degree(std::size_t v) const { return adjacency[v].size(); }
};

// Per-vertex closeness with the Wasserman-Faust correction for
// disconnected graphs: ((r-1)/sum d) * ((r-1)/(|V|-1)), r = reachable
// vertices including x; 0 for isolated vertices.
std::vector<double> closeness_centrality(const EntityGraph& graph);

// Throws EmptyGraphError when the KG has no entity-graph vertices.
GraphStats compute_stats(const KnowledgeGraph& kg,
                         DegreeCentralityForm form = DegreeCentralityForm::normalised);

struct BiasThresholds {
  double type1 = 0.5;
  double type2 = 0.75;
  double type3 = 0.5;
};

struct BiasReport {
  std::vector<Triple> triples;  // entity-graph triples, in KG order
  std::vector<double> b1, b2, b3;
  BiasThresholds thresholds;
  std::set<Triple> flagged_b1, flagged_b2, flagged_b3;

  std::size_t flagged_count() const;
  std::set<Triple> flagged() const;
};

// Sample-selection bias scores per entity-graph triple (h, r, t), each the
// larger of its tail- and head-prediction variants:
//   b1  share of r-triples whose tail is t (head: whose head is h)
//   b2  for relations with several tails per head, share of r-heads whose
//       tail set contains t (head side: share of r-tails whose head set
//       contains h); 0 for relations without that multiplicity
//   b3  max over relations r' linking h and t (either direction) of
//       |pairs(r) ∩ pairs(r')| / |pairs(r)|
// A triple is flagged when a score strictly exceeds its threshold.
BiasReport detect_biases(const KnowledgeGraph& kg, BiasThresholds thresholds = {});

// The KG without every flagged triple (literal statements are kept).
KnowledgeGraph debias(const KnowledgeGraph& kg, BiasThresholds thresholds = {});

}  // namespace pdpk
