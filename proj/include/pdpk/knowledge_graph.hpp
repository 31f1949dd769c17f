#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pdpk/types.hpp"

namespace pdpk {

namespace vocab {
inline constexpr std::string_view kVocabNamespace = "http://purl.org/pdpk/vocab#";
inline constexpr std::string_view kEntityNamespace = "http://purl.org/pdpk/entity#";
inline constexpr std::string_view kXsdNamespace = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kXsdDouble = "http://www.w3.org/2001/XMLSchema#double";

// Entity-to-entity relations.
inline constexpr std::string_view kImplies = "implies";
inline constexpr std::string_view kAdjusts = "adjusts";
inline constexpr std::string_view kHasCondition = "hasCondition";
inline constexpr std::string_view kHasAdjustment = "hasAdjustment";
inline constexpr std::string_view kOnParameter = "onParameter";
inline constexpr std::string_view kHasQuantification = "hasQuantification";
// Literal-valued relations.
inline constexpr std::string_view kRhoHat = "rhoHat";
inline constexpr std::string_view kConditionLower = "conditionLower";
inline constexpr std::string_view kConditionUpper = "conditionUpper";

std::string relation_iri(std::string_view local_name);
std::string entity_iri(std::string_view local_name);
}  // namespace vocab

using EntityId = std::size_t;
using RelationId = std::size_t;

// Role of an entity, read from its local name prefix (p_, q_, adj_, st_,
// quant_, lit_). Annotation nodes (lit_) only hold literals of the
// literal-bearing representation and do not belong to the entity graph.
enum class EntityKind { parameter, quality, adjustment, statement, quantity, annotation, other };

EntityKind entity_kind_of(std::string_view iri);

struct Literal {
  double value = 0.0;  // typed xsd:double
  auto operator<=>(const Literal&) const = default;
};

using Node = std::variant<EntityId, Literal>;

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  Node tail;

  bool tail_is_entity() const { return std::holds_alternative<EntityId>(tail); }
  EntityId tail_entity() const { return std::get<EntityId>(tail); }
  auto operator<=>(const Triple&) const = default;
};

class KnowledgeGraph {
 public:
  explicit KnowledgeGraph(Representation representation)
      : representation_(representation) {}

  Representation representation() const { return representation_; }

  // Registration is idempotent: a known IRI returns its existing id.
  EntityId add_entity(std::string_view iri);
  RelationId add_relation(std::string_view iri);
  // Returns false for a duplicate.
  bool add_triple(EntityId head, RelationId relation, Node tail);

  std::optional<EntityId> find_entity(std::string_view iri) const;
  std::optional<RelationId> find_relation(std::string_view iri) const;
  const std::string& entity_iri(EntityId id) const;
  const std::string& relation_iri(RelationId id) const;
  EntityKind entity_kind(EntityId id) const;
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t relation_registry_size() const { return relations_.size(); }

  const std::set<Triple>& triples() const { return triples_; }
  bool contains(const Triple& triple) const { return triples_.contains(triple); }

  // Entity-graph view: triples between two non-annotation entities. Literal
  // statements and the links to annotation nodes are counted separately.
  bool is_structural(const Triple& triple) const;
  std::vector<Triple> structural_triples() const;
  std::vector<Triple> literal_layer_triples() const;
  // Non-annotation entities, ascending id.
  std::vector<EntityId> structural_entities() const;
  // Distinct relations used by structural triples.
  std::size_t structural_relation_count() const;

  // Same registries, a different triple set.
  KnowledgeGraph with_triples(std::span<const Triple> triples) const;

  bool operator==(const KnowledgeGraph&) const;

 private:
  Representation representation_;
  std::vector<std::string> entities_;
  std::vector<EntityKind> entity_kinds_;
  std::map<std::string, EntityId, std::less<>> entity_index_;
  std::vector<std::string> relations_;
  std::map<std::string, RelationId, std::less<>> relation_index_;
  std::set<Triple> triples_;
};

// Canonical comparison of two graphs by IRIs and literal values, independent
// of id assignment.
bool same_triples(const KnowledgeGraph& a, const KnowledgeGraph& b);

}  // namespace pdpk
