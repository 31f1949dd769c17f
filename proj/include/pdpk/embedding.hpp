#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pdpk/knowledge_graph.hpp"
#include "pdpk/random.hpp"

namespace pdpk {

// translation: -||h + r - t||_2, bilinear: sum_d h[d] r[d] t[d].
enum class Scorer { translation, bilinear };

std::string_view to_string(Scorer scorer);
std::optional<Scorer> parse_scorer(std::string_view text);

struct TrainingOptions {
  Scorer scorer = Scorer::translation;
  std::size_t dim = 46;
  std::size_t epochs = 400;
  double learning_rate = 4e-4;
  double weight_decay = 1e-5;
  std::size_t batch_size = 8;
  double margin = 1.0;  // translation only
  // Rescale entity vectors to unit L2 norm before every batch and after
  // training.
  bool normalize_entities = true;
};

struct TrainingReport {
  std::vector<double> loss_history;  // mean loss per positive, per epoch
  // Least-squares slope of the loss over the final 10% of epochs is <= 0.
  bool converged = false;
  std::size_t training_triples = 0;
  std::size_t dropped_statements = 0;  // literal and annotation statements
};

// Vectors are indexed by KG entity and relation id.
class EmbeddingModel {
 public:
  EmbeddingModel(Scorer scorer, std::size_t dim, std::size_t entity_count,
                 std::size_t relation_count);

  Scorer scorer() const { return scorer_; }
  std::size_t dim() const { return dim_; }
  std::size_t entity_count() const { return entities_.size() / dim_; }
  std::size_t relation_count() const { return relations_.size() / dim_; }

  std::span<double> entity(EntityId id);
  std::span<const double> entity(EntityId id) const;
  std::span<double> relation(RelationId id);
  std::span<const double> relation(RelationId id) const;

  // Higher is more plausible. Throws UnknownIdError.
  double score(EntityId head, RelationId relation, EntityId tail) const;

  std::vector<double>& entity_data() { return entities_; }
  std::vector<double>& relation_data() { return relations_; }

  bool operator==(const EmbeddingModel&) const = default;

 private:
  Scorer scorer_;
  std::size_t dim_;
  std::vector<double> entities_;
  std::vector<double> relations_;
};

// Vectors uniform in [-6/sqrt(dim), 6/sqrt(dim)] for every registered
// entity and relation of `kg`.
EmbeddingModel random_model(const KnowledgeGraph& kg, Scorer scorer, std::size_t dim,
                            SeededRandom& rng);

// Trains on the entity-graph triples of `kg` (literal statements dropped)
// with AdamW and one uniformly corrupted head or tail per positive and
// epoch. Translation minimises max(0, margin + d(pos) - d(neg)), bilinear
// softplus(-s(pos)) + softplus(s(neg)). Throws EmptyGraphError and
// TrainingDivergedError on a non-finite loss.
EmbeddingModel train(const KnowledgeGraph& kg, const TrainingOptions& options,
                     SeededRandom& rng, TrainingReport* report = nullptr);

}  // namespace pdpk
