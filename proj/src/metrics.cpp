#include "pdpk/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <tuple>

#include "pdpk/errors.hpp"

namespace pdpk {

std::string_view to_string(Side side) { return side == Side::head ? "head" : "tail"; }

std::vector<RankResult> rank(const TripleScorer& scorer, std::span<const Triple> test,
                             std::span<const Triple> known,
                             std::span<const EntityId> candidates, RankOptions options) {
  std::set<std::tuple<EntityId, RelationId, EntityId>> filter;
  if (options.filtered) {
    for (auto group : {known, test}) {
      for (const auto& t : group) {
        if (t.tail_is_entity()) filter.insert({t.head, t.relation, t.tail_entity()});
      }
    }
  }
  std::vector<RankResult> results;
  results.reserve(test.size());
  for (const auto& t : test) {
    const auto truth = options.side == Side::head ? t.head : t.tail_entity();
    if (std::find(candidates.begin(), candidates.end(), truth) == candidates.end()) {
      throw UnknownIdError("true entity is not a candidate");
    }
    const double true_score = scorer(t.head, t.relation, t.tail_entity());
    std::size_t better = 0, equal = 0, survivors = 1;
    for (auto candidate : candidates) {
      if (candidate == truth) continue;
      const auto h = options.side == Side::head ? candidate : t.head;
      const auto tail = options.side == Side::head ? t.tail_entity() : candidate;
      if (options.filtered && filter.contains({h, t.relation, tail})) continue;
      ++survivors;
      const double s = scorer(h, t.relation, tail);
      if (s > true_score) {
        ++better;
      } else if (s == true_score) {
        ++equal;
      }
    }
    double r = 1.0 + static_cast<double>(better);
    if (options.ties == TieMode::mean) r += static_cast<double>(equal) / 2.0;
    if (options.ties == TieMode::pessimistic) r += static_cast<double>(equal);
    results.push_back({r, survivors});
  }
  return results;
}

std::vector<RankResult> rank(const EmbeddingModel& model, std::span<const Triple> test,
                             std::span<const Triple> known,
                             std::span<const EntityId> candidates, RankOptions options) {
  return rank([&](EntityId h, RelationId r, EntityId t) { return model.score(h, r, t); }, test,
              known, candidates, options);
}

double hits_at_k(std::span<const RankResult> ranks, double k) {
  if (ranks.empty()) throw EmptyInputError("no ranks");
  std::size_t hits = 0;
  for (const auto& r : ranks) hits += r.rank <= k;
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double amri(std::span<const RankResult> ranks) {
  if (ranks.empty()) throw EmptyInputError("no ranks");
  double numerator = 0.0, denominator = 0.0;
  for (const auto& r : ranks) {
    if (r.candidates < 2) throw DegenerateCandidateSetError("candidate set of size < 2");
    numerator += r.rank - 1.0;
    denominator += static_cast<double>(r.candidates - 1);
  }
  return std::clamp(1.0 - 2.0 * numerator / denominator, -1.0, 1.0);
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

TripleScorer random_scorer(std::uint64_t seed) {
  return [seed](EntityId h, RelationId r, EntityId t) {
    const auto bits = mix(mix(mix(mix(seed) ^ h) ^ r) ^ t);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  };
}

std::size_t default_propagation_steps(Representation representation) {
  return representation == Representation::ch_l_eta ? 1 : 2;
}

std::vector<double> aggregate_subgraph(const EmbeddingModel& model, const KnowledgeGraph& kg,
                                       EntityId quality, const MatchesConfig& config) {
  if (quality >= kg.entity_count() || kg.entity_kind(quality) != EntityKind::quality) {
    throw UnknownIdError("not a quality entity: " + std::to_string(quality));
  }
  const auto steps =
      config.propagation_steps.value_or(default_propagation_steps(kg.representation()));
  if (steps < 1) throw DomainError("propagation steps must be at least 1");

  std::map<EntityId, std::vector<EntityId>> outgoing, incoming;
  for (const auto& t : kg.structural_triples()) {
    outgoing[t.head].push_back(t.tail_entity());
    incoming[t.tail_entity()].push_back(t.head);
  }
  std::set<EntityId> reached{quality};
  std::vector<EntityId> frontier{quality};
  for (std::size_t hop = 0; hop < steps && !frontier.empty(); ++hop) {
    std::vector<EntityId> next;
    auto visit = [&](EntityId v) {
      if (reached.insert(v).second) next.push_back(v);
    };
    for (auto v : frontier) {
      for (auto w : outgoing[v]) visit(w);
      if (hop == 0) {
        for (auto w : incoming[v]) visit(w);
      }
    }
    frontier = std::move(next);
  }

  std::vector<double> sum(model.dim(), 0.0);
  for (auto v : reached) {
    if (v == quality && !config.include_head) continue;
    const auto vec = model.entity(v);
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += vec[d];
  }

  if (kg.representation() == Representation::ch_l_eta) {
    const std::array roles = {vocab::kRhoHat, vocab::kConditionLower, vocab::kConditionUpper};
    std::array<double, 3> literals{};
    std::set<EntityId> annotations;
    for (const auto& t : kg.triples()) {
      if (t.head == quality && t.tail_is_entity() &&
          kg.entity_kind(t.tail_entity()) == EntityKind::annotation) {
        annotations.insert(t.tail_entity());
      }
    }
    for (const auto& t : kg.triples()) {
      if (!annotations.contains(t.head) || t.tail_is_entity()) continue;
      for (std::size_t i = 0; i < roles.size(); ++i) {
        if (kg.relation_iri(t.relation) == vocab::relation_iri(roles[i])) {
          literals[i] += std::get<Literal>(t.tail).value;
        }
      }
    }
    sum.insert(sum.end(), literals.begin(), literals.end());
  }
  return sum;
}

double matches_at_k(const std::map<std::size_t, std::set<std::size_t>>& parameters_of,
                    const std::map<std::size_t, std::vector<double>>& vectors, std::size_t k) {
  if (k < 1) throw DomainError("k must be at least 1");
  if (parameters_of.size() < k + 1) {
    throw InsufficientQualitiesError("matches@" + std::to_string(k) + " needs at least " +
                                     std::to_string(k + 1) + " qualities");
  }
  double total = 0.0;
  for (const auto& [q, params] : parameters_of) {
    std::vector<std::pair<double, std::size_t>> graph, embedding;
    const auto& own = vectors.at(q);
    for (const auto& [other, other_params] : parameters_of) {
      if (other == q) continue;
      std::size_t shared = 0;
      for (auto p : params) shared += other_params.contains(p);
      graph.push_back({-static_cast<double>(shared), other});
      const auto& vec = vectors.at(other);
      double distance = 0.0;
      for (std::size_t d = 0; d < own.size(); ++d) distance += (own[d] - vec[d]) * (own[d] - vec[d]);
      embedding.push_back({std::sqrt(distance), other});
    }
    std::sort(graph.begin(), graph.end());
    std::sort(embedding.begin(), embedding.end());
    std::set<std::size_t> top;
    for (std::size_t i = 0; i < k; ++i) top.insert(graph[i].second);
    std::size_t overlap = 0;
    for (std::size_t i = 0; i < k; ++i) overlap += top.contains(embedding[i].second);
    total += static_cast<double>(overlap) / static_cast<double>(k);
  }
  return total / static_cast<double>(parameters_of.size());
}

double matches_at_k(const EmbeddingModel& model, const KnowledgeGraph& kg,
                    std::span<const Rule> rules, const MatchesConfig& config) {
  std::map<std::size_t, std::set<std::size_t>> parameters_of;
  for (const auto& rule : rules) parameters_of[rule.quality].insert(rule.parameter);
  std::map<std::size_t, std::vector<double>> vectors;
  for (const auto& [q, params] : parameters_of) {
    const auto id = kg.find_entity(vocab::entity_iri("q_" + std::to_string(q)));
    if (!id) throw UnknownIdError("quality q_" + std::to_string(q) + " is not in the graph");
    vectors[q] = aggregate_subgraph(model, kg, *id, config);
  }
  return matches_at_k(parameters_of, vectors, config.k);
}

}  // namespace pdpk
