#include "pdpk/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "pdpk/errors.hpp"
#include "pdpk/turtle.hpp"

namespace pdpk {

std::size_t Dataset::iteration_count() const {
  std::size_t total = 0;
  for (const auto& process : processes) total += process.iterations.size();
  return total;
}

namespace {

ConditionStrategy strategy_of(const GeneratorConfig& config) {
  return config.condition_strategy == ConditionStrategyKind::fixed_count
             ? ConditionStrategy::fixed_count(config.condition_bins)
             : ConditionStrategy::freedman_diaconis();
}

std::vector<std::vector<double>> quality_samples(
    const std::vector<ParametrisationProcess>& processes, std::size_t q_count,
    const std::set<IterationRef>* exclude = nullptr) {
  std::vector<std::vector<double>> samples(q_count);
  for (const auto& process : processes) {
    for (const auto& iteration : process.iterations) {
      if (exclude && exclude->contains({process.id, iteration.index})) continue;
      for (std::size_t j = 0; j < q_count; ++j) samples[j].push_back(iteration.qualities[j]);
    }
  }
  return samples;
}

std::map<Representation, KnowledgeGraph> render_all(const std::vector<Rule>& rules) {
  std::map<Representation, KnowledgeGraph> kgs;
  for (auto representation : kAllRepresentations) {
    kgs.emplace(representation, build_kg(rules, representation));
  }
  return kgs;
}

}  // namespace

Dataset generate_dataset(const GeneratorConfig& config) {
  config.validate();
  const SeededRandom root(config.seed);
  auto space_rng = root.substream("space");
  PQSpace space = build_pq_space(config, space_rng);
  auto process_rng = root.substream("processes");
  auto processes = generate_processes(space, config, process_rng);

  std::vector<std::string> warnings;
  const auto samples = quality_samples(processes, config.q_count);
  auto rules = extract_rules(space, strategy_of(config), &samples, &warnings);
  auto kgs = render_all(rules);
  return Dataset{config,           std::move(space), std::move(processes),
                 std::move(rules), std::move(kgs),   std::move(warnings)};
}

std::string format_csv_double(double value) {
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 9);
  return std::string(buffer, result.ptr);
}

void write_process_csv(std::ostream& out, const Dataset& dataset,
                       const std::set<IterationRef>* only) {
  const auto p_count = dataset.space.parameters().size();
  const auto q_count = dataset.space.qualities().size();
  out << "process_id,behaviour,iteration,score";
  for (std::size_t k = 0; k < p_count; ++k) out << ",p_" << k;
  for (std::size_t j = 0; j < q_count; ++j) out << ",q_" << j;
  out << '\n';
  for (const auto& process : dataset.processes) {
    for (const auto& iteration : process.iterations) {
      if (only && !only->contains({process.id, iteration.index})) continue;
      out << process.id << ',' << to_string(process.behaviour) << ',' << iteration.index
          << ',' << format_csv_double(iteration.score);
      for (double v : iteration.parametrisation) out << ',' << format_csv_double(v);
      for (double v : iteration.qualities) out << ',' << format_csv_double(v);
      out << '\n';
    }
  }
  if (!out) throw IoError("failed to write process data");
}

std::string kg_file_name(Representation representation) {
  return "kg_" + std::string(to_string(representation)) + ".ttl";
}

nlohmann::json manifest_json(const Dataset& dataset) {
  using nlohmann::json;
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = to_json(dataset.config);

  json counts;
  counts["parameters"] = dataset.space.parameters().size();
  counts["qualities"] = dataset.space.qualities().size();
  counts["dependencies"] = dataset.space.dependencies().size();
  counts["known_dependencies"] = dataset.space.known().size();
  counts["processes"] = dataset.processes.size();
  counts["iterations"] = dataset.iteration_count();
  counts["rules"] = dataset.rules.size();
  json triples = json::object();
  for (const auto& [representation, kg] : dataset.kgs) {
    triples[std::string(to_string(representation))] = {
        {"statements", kg.triples().size()},
        {"edges", kg.structural_triples().size()},
        {"vertices", kg.structural_entities().size()},
        {"relations", kg.structural_relation_count()}};
  }
  counts["kgs"] = triples;
  manifest["counts"] = counts;

  json dependencies = json::array();
  for (const auto& [key, f] : dataset.space.dependencies()) {
    dependencies.push_back({{"parameter", key.first},
                            {"quality", key.second},
                            {"kind", to_string(f.kind())},
                            {"increasing", f.increasing()},
                            {"known", dataset.space.is_known(key.first, key.second)},
                            {"coefficients", f.coefficients()}});
  }
  manifest["dependencies"] = dependencies;

  json rules = json::array();
  for (const auto& rule : dataset.rules) {
    rules.push_back({{"quality", rule.quality},
                     {"parameter", rule.parameter},
                     {"condition", {rule.condition.min(), rule.condition.max()}},
                     {"rho_hat", rule.rho_hat}});
  }
  manifest["rules"] = rules;

  json files = json::array({"process_data.csv"});
  for (auto representation : kAllRepresentations) files.push_back(kg_file_name(representation));
  files.push_back("manifest.json");
  files.push_back("metadata.ttl");
  manifest["files"] = files;
  manifest["warnings"] = dataset.warnings;
  return manifest;
}

namespace {

std::string turtle_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

}  // namespace

std::string metadata_turtle(const Dataset& dataset) {
  std::ostringstream out;
  out << "@prefix pdpk: <" << vocab::kVocabNamespace << "> .\n"
      << "@prefix dcterms: <http://purl.org/dc/terms/> .\n"
      << "@prefix xsd: <" << vocab::kXsdNamespace << "> .\n\n"
      << "<urn:pdpk:dataset:" << dataset.config.seed << ">\n"
      << "  dcterms:creator " << turtle_string("pdpk " + std::string(kVersion)) << " ;\n"
      << "  pdpk:seed \"" << dataset.config.seed << "\"^^xsd:integer ;\n"
      << "  pdpk:processCount \"" << dataset.processes.size() << "\"^^xsd:integer ;\n"
      << "  pdpk:iterationCount \"" << dataset.iteration_count() << "\"^^xsd:integer ;\n"
      << "  pdpk:ruleCount \"" << dataset.rules.size() << "\"^^xsd:integer ;\n";
  out << "  dcterms:hasPart " << turtle_string("process_data.csv");
  for (auto representation : kAllRepresentations) {
    out << ", " << turtle_string(kg_file_name(representation));
  }
  out << " ;\n"
      << "  pdpk:configuration " << turtle_string(to_json(dataset.config).dump()) << " .\n";
  return out.str();
}

SplitResult split_link_prediction(const KnowledgeGraph& kg, double fraction,
                                  SeededRandom& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("split fraction must lie in (0, 1)");
  }
  const auto edges = kg.structural_triples();
  if (edges.size() < 2) throw SplitInfeasibleError("graph has fewer than 2 triples");
  const auto wanted = share_count(fraction, edges.size());

  std::map<EntityId, std::size_t> entity_uses;
  std::map<RelationId, std::size_t> relation_uses;
  for (const auto& t : edges) {
    ++entity_uses[t.head];
    ++entity_uses[t.tail_entity()];
    ++relation_uses[t.relation];
  }

  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<bool> in_test(edges.size(), false);
  std::size_t moved = 0;
  for (auto i : order) {
    if (moved == wanted) break;
    const auto& t = edges[i];
    const auto h = t.head, tail = t.tail_entity();
    if (relation_uses[t.relation] < 2) continue;
    if (h == tail ? entity_uses[h] < 3 : (entity_uses[h] < 2 || entity_uses[tail] < 2)) {
      continue;
    }
    --relation_uses[t.relation];
    --entity_uses[h];
    --entity_uses[tail];
    in_test[i] = true;
    ++moved;
  }
  if (moved == 0) {
    throw SplitInfeasibleError("no triple can be held out without losing an entity or relation");
  }

  SplitResult result;
  result.kind = SplitKind::link_prediction;
  result.requested_fraction = fraction;
  std::set<std::pair<EntityId, EntityId>> test_pairs;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (in_test[i]) {
      result.test.push_back(edges[i]);
      test_pairs.insert({edges[i].head, edges[i].tail_entity()});
    } else {
      result.train.push_back(edges[i]);
    }
  }
  result.achieved_fraction = static_cast<double>(moved) / static_cast<double>(edges.size());
  if (moved < wanted) {
    result.warnings.push_back("only " + std::to_string(moved) + " of " +
                              std::to_string(wanted) +
                              " requested test triples keep every entity and relation in train");
  }

  // Annotation nodes linking both ends of a test triple would leak it.
  std::map<EntityId, std::set<EntityId>> annotation_links;
  for (const auto& t : kg.triples()) {
    if (!t.tail_is_entity()) continue;
    const auto tail = t.tail_entity();
    if (kg.entity_kind(t.head) == EntityKind::annotation) annotation_links[t.head].insert(tail);
    if (kg.entity_kind(tail) == EntityKind::annotation) annotation_links[tail].insert(t.head);
  }
  std::set<EntityId> leaking;
  for (const auto& [node, links] : annotation_links) {
    for (const auto& [h, tail] : test_pairs) {
      if (links.contains(h) && links.contains(tail)) leaking.insert(node);
    }
  }
  for (const auto& t : kg.literal_layer_triples()) {
    const bool leaks = leaking.contains(t.head) ||
                       (t.tail_is_entity() && leaking.contains(t.tail_entity()));
    (leaks ? result.test : result.train).push_back(t);
  }
  return result;
}

SplitResult split_downstream(const Dataset& dataset, double fraction, SeededRandom& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError("split fraction must lie in (0, 1)");
  }
  std::vector<IterationRef> all;
  for (const auto& process : dataset.processes) {
    for (const auto& iteration : process.iterations) all.push_back({process.id, iteration.index});
  }
  const auto wanted = share_count(fraction, all.size());
  auto picked = rng.sample_without_replacement(all.size(), wanted);
  std::sort(picked.begin(), picked.end());

  SplitResult result;
  result.kind = SplitKind::downstream;
  result.requested_fraction = fraction;
  std::set<IterationRef> test;
  for (auto i : picked) test.insert(all[i]);
  for (const auto& ref : all) {
    (test.contains(ref) ? result.test_iterations : result.train_iterations).push_back(ref);
  }
  result.achieved_fraction =
      all.empty() ? 0.0 : static_cast<double>(test.size()) / static_cast<double>(all.size());

  if (dataset.config.condition_strategy == ConditionStrategyKind::fixed_count) {
    result.pruned_kgs = dataset.kgs;
    result.pruning_was_noop = true;
    return result;
  }
  const auto samples = quality_samples(dataset.processes, dataset.space.qualities().size(), &test);
  const auto rules = extract_rules(dataset.space, strategy_of(dataset.config), &samples,
                                   &result.warnings);
  result.pruned_kgs = render_all(rules);
  result.pruning_was_noop = true;
  for (const auto& [representation, kg] : result.pruned_kgs) {
    if (!same_triples(kg, dataset.kgs.at(representation))) result.pruning_was_noop = false;
  }
  return result;
}

}  // namespace pdpk
