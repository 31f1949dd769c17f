#include "pdpk/knowledge_graph.hpp"

#include <tuple>

#include "pdpk/errors.hpp"

namespace pdpk {

namespace vocab {
std::string relation_iri(std::string_view local_name) {
  return std::string(kVocabNamespace) + std::string(local_name);
}
std::string entity_iri(std::string_view local_name) {
  return std::string(kEntityNamespace) + std::string(local_name);
}
}  // namespace vocab

EntityKind entity_kind_of(std::string_view iri) {
  auto local = iri;
  if (local.starts_with(vocab::kEntityNamespace)) {
    local.remove_prefix(vocab::kEntityNamespace.size());
  } else {
    return EntityKind::other;
  }
  if (local.starts_with("p_")) return EntityKind::parameter;
  if (local.starts_with("q_")) return EntityKind::quality;
  if (local.starts_with("adj_")) return EntityKind::adjustment;
  if (local.starts_with("st_")) return EntityKind::statement;
  if (local.starts_with("quant_")) return EntityKind::quantity;
  if (local.starts_with("lit_")) return EntityKind::annotation;
  return EntityKind::other;
}

EntityId KnowledgeGraph::add_entity(std::string_view iri) {
  if (auto it = entity_index_.find(iri); it != entity_index_.end()) return it->second;
  const EntityId id = entities_.size();
  entities_.emplace_back(iri);
  entity_kinds_.push_back(entity_kind_of(iri));
  entity_index_.emplace(std::string(iri), id);
  return id;
}

RelationId KnowledgeGraph::add_relation(std::string_view iri) {
  if (auto it = relation_index_.find(iri); it != relation_index_.end()) return it->second;
  const RelationId id = relations_.size();
  relations_.emplace_back(iri);
  relation_index_.emplace(std::string(iri), id);
  return id;
}

bool KnowledgeGraph::add_triple(EntityId head, RelationId relation, Node tail) {
  if (head >= entities_.size() || relation >= relations_.size()) {
    throw UnknownIdError("triple references an unregistered id");
  }
  if (const auto* entity = std::get_if<EntityId>(&tail); entity && *entity >= entities_.size()) {
    throw UnknownIdError("triple references an unregistered tail entity");
  }
  return triples_.insert(Triple{head, relation, tail}).second;
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view iri) const {
  if (auto it = entity_index_.find(iri); it != entity_index_.end()) return it->second;
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::find_relation(std::string_view iri) const {
  if (auto it = relation_index_.find(iri); it != relation_index_.end()) return it->second;
  return std::nullopt;
}

const std::string& KnowledgeGraph::entity_iri(EntityId id) const {
  if (id >= entities_.size()) throw UnknownIdError("unknown entity id " + std::to_string(id));
  return entities_[id];
}

const std::string& KnowledgeGraph::relation_iri(RelationId id) const {
  if (id >= relations_.size()) throw UnknownIdError("unknown relation id " + std::to_string(id));
  return relations_[id];
}

EntityKind KnowledgeGraph::entity_kind(EntityId id) const {
  if (id >= entities_.size()) throw UnknownIdError("unknown entity id " + std::to_string(id));
  return entity_kinds_[id];
}

bool KnowledgeGraph::is_structural(const Triple& triple) const {
  if (!triple.tail_is_entity()) return false;
  return entity_kinds_[triple.head] != EntityKind::annotation &&
         entity_kinds_[triple.tail_entity()] != EntityKind::annotation;
}

std::vector<Triple> KnowledgeGraph::structural_triples() const {
  std::vector<Triple> out;
  for (const auto& t : triples_) {
    if (is_structural(t)) out.push_back(t);
  }
  return out;
}

std::vector<Triple> KnowledgeGraph::literal_layer_triples() const {
  std::vector<Triple> out;
  for (const auto& t : triples_) {
    if (!is_structural(t)) out.push_back(t);
  }
  return out;
}

std::vector<EntityId> KnowledgeGraph::structural_entities() const {
  std::vector<EntityId> out;
  for (EntityId id = 0; id < entities_.size(); ++id) {
    if (entity_kinds_[id] != EntityKind::annotation) out.push_back(id);
  }
  return out;
}

std::size_t KnowledgeGraph::structural_relation_count() const {
  std::set<RelationId> used;
  for (const auto& t : triples_) {
    if (is_structural(t)) used.insert(t.relation);
  }
  return used.size();
}

KnowledgeGraph KnowledgeGraph::with_triples(std::span<const Triple> triples) const {
  KnowledgeGraph out(representation_);
  out.entities_ = entities_;
  out.entity_kinds_ = entity_kinds_;
  out.entity_index_ = entity_index_;
  out.relations_ = relations_;
  out.relation_index_ = relation_index_;
  for (const auto& t : triples) out.add_triple(t.head, t.relation, t.tail);
  return out;
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  return representation_ == other.representation_ && same_triples(*this, other);
}

bool same_triples(const KnowledgeGraph& a, const KnowledgeGraph& b) {
  using Key = std::tuple<std::string, std::string, std::string, double>;
  auto canonical = [](const KnowledgeGraph& g) {
    std::set<Key> keys;
    for (const auto& t : g.triples()) {
      if (t.tail_is_entity()) {
        keys.emplace(g.entity_iri(t.head), g.relation_iri(t.relation),
                     g.entity_iri(t.tail_entity()), 0.0);
      } else {
        keys.emplace(g.entity_iri(t.head), g.relation_iri(t.relation), "",
                     std::get<Literal>(t.tail).value);
      }
    }
    return keys;
  };
  return canonical(a) == canonical(b);
}

}  // namespace pdpk
