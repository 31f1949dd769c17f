#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "pdpk/embedding.hpp"
#include "pdpk/kg_gen.hpp"
#include "pdpk/knowledge_graph.hpp"

namespace pdpk {

enum class Side { head, tail };
// Rank of the true entity among equally scored candidates.
enum class TieMode { mean, optimistic, pessimistic };

std::string_view to_string(Side side);

struct RankResult {
  double rank = 1.0;           // 1-based, half-integral under TieMode::mean
  std::size_t candidates = 1;  // surviving candidates including the true one
};

using TripleScorer = std::function<double(EntityId, RelationId, EntityId)>;

struct RankOptions {
  Side side = Side::tail;
  TieMode ties = TieMode::mean;
  bool filtered = true;  // drop candidates forming a known triple
};

// Scores every candidate substitution on one side of each test triple.
// `known` and `test` together form the filter set. Test triples must have
// entity tails, and their true entity must be among `candidates`.
std::vector<RankResult> rank(const TripleScorer& scorer, std::span<const Triple> test,
                             std::span<const Triple> known,
                             std::span<const EntityId> candidates, RankOptions options = {});

// Uses every id the model knows as a candidate. Throws UnknownIdError.
std::vector<RankResult> rank(const EmbeddingModel& model, std::span<const Triple> test,
                             std::span<const Triple> known,
                             std::span<const EntityId> candidates, RankOptions options = {});

// |{r <= k}| / |I|. Throws EmptyInputError.
double hits_at_k(std::span<const RankResult> ranks, double k);

// 1 - 2 sum(r - 1) / sum(|S| - 1), clamped to [-1, 1]. Throws
// DegenerateCandidateSetError when some |S| < 2 and EmptyInputError.
double amri(std::span<const RankResult> ranks);

// Deterministic pseudo-random scores in [0, 1) per (seed, h, r, t).
TripleScorer random_scorer(std::uint64_t seed);

struct MatchesConfig {
  std::size_t k = 3;
  bool include_head = true;                      // h when set, h-bar otherwise
  std::optional<std::size_t> propagation_steps;  // per-representation default
};

// Hops from a quality node to the parameter layer.
std::size_t default_propagation_steps(Representation representation);

// Sum of the vectors of every entity within the propagation radius of
// `quality`. The first hop follows edges in both directions (reified
// statements point at the quality), later hops follow outgoing edges only.
// For ch_l_eta the sums of rhoHat, conditionLower and conditionUpper over
// the quality's annotations are appended as three extra coordinates.
// Throws UnknownIdError unless `quality` is a quality entity.
std::vector<double> aggregate_subgraph(const EmbeddingModel& model, const KnowledgeGraph& kg,
                                       EntityId quality, const MatchesConfig& config);

// Core of matches@k over qualities keyed by index: graph neighbours by
// shared parameters (descending), embedding neighbours by Euclidean
// distance (ascending), ties by quality index. Throws
// InsufficientQualitiesError for fewer than k + 1 qualities.
double matches_at_k(const std::map<std::size_t, std::set<std::size_t>>& parameters_of,
                    const std::map<std::size_t, std::vector<double>>& vectors, std::size_t k);

// In-sample matches@k over the qualities that carry rules.
double matches_at_k(const EmbeddingModel& model, const KnowledgeGraph& kg,
                    std::span<const Rule> rules, const MatchesConfig& config);

}  // namespace pdpk
