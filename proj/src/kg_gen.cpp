#include "pdpk/kg_gen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

#include "pdpk/errors.hpp"

namespace pdpk {

double quantify_parameter(const DependencyFunction& f, double lower, double upper) {
  const auto& domain = f.target();
  if (!(lower < upper) || !domain.contains(lower) || !domain.contains(upper)) {
    throw DomainError("invalid condition range for quantification");
  }
  const double denominator = domain.width() - 1.0;
  if (!(denominator > 0.0)) {
    throw DomainError("quality domain too narrow for quantification (width <= 1)");
  }
  const auto steps = static_cast<std::size_t>(
      std::max(1.0, std::ceil(upper - lower - 1e-9)));
  const double step = (upper - lower) / static_cast<double>(steps);
  auto point = [&](std::size_t i) {
    return i == steps ? upper : lower + static_cast<double>(i) * step;
  };
  double sum = 0.0;
  double previous = f.inverse(point(0));
  for (std::size_t i = 0; i < steps; ++i) {
    const double next = f.inverse(point(i + 1));
    sum += previous - next;
    previous = next;
  }
  return sum / denominator;
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw EstimatorError("quantile of no samples");
  std::sort(samples.begin(), samples.end());
  const double position = q * static_cast<double>(samples.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(position));
  const auto above = std::min(below + 1, samples.size() - 1);
  const double fraction = position - static_cast<double>(below);
  return samples[below] + fraction * (samples[above] - samples[below]);
}

namespace {

std::vector<ValueRange> equal_bins(const ValueRange& domain, std::size_t bins) {
  std::vector<ValueRange> out;
  const double width = domain.width() / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double lo = domain.min() + static_cast<double>(i) * width;
    const double hi = i + 1 == bins ? domain.max()
                                    : domain.min() + static_cast<double>(i + 1) * width;
    out.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace

std::vector<ValueRange> quantify_conditions(const Quality& quality,
                                            const ConditionStrategy& strategy,
                                            std::span<const double> samples) {
  if (strategy.kind == ConditionStrategyKind::fixed_count) {
    if (strategy.bins < 1) throw DomainError("fixed_count needs at least one bin");
    return equal_bins(quality.domain, strategy.bins);
  }
  if (samples.size() < 2) {
    throw EstimatorError("Freedman-Diaconis needs at least 2 samples for " + quality.name);
  }
  std::vector<double> values(samples.begin(), samples.end());
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  if (!(iqr > 0.0)) {
    throw EstimatorError("zero interquartile range for " + quality.name);
  }
  const double bin_width = 2.0 * iqr * std::pow(static_cast<double>(values.size()), -1.0 / 3.0);
  const auto bins = static_cast<std::size_t>(
      std::max(1.0, std::ceil(quality.domain.width() / bin_width - 1e-9)));
  return equal_bins(quality.domain, bins);
}

std::vector<Rule> extract_rules(const PQSpace& space, const ConditionStrategy& strategy,
                                const std::vector<std::vector<double>>* samples,
                                std::vector<std::string>* warnings) {
  std::map<std::size_t, std::vector<ValueRange>> ranges;
  auto ranges_for = [&](std::size_t j) -> const std::vector<ValueRange>& {
    auto it = ranges.find(j);
    if (it != ranges.end()) return it->second;
    const auto& quality = space.qualities()[j];
    std::vector<ValueRange> computed;
    try {
      std::span<const double> observed;
      if (samples && j < samples->size()) observed = (*samples)[j];
      computed = quantify_conditions(quality, strategy, observed);
    } catch (const EstimatorError& e) {
      if (warnings) warnings->push_back(std::string(e.what()) + "; using one range");
      computed = quantify_conditions(quality, ConditionStrategy::fixed_count(1));
    }
    return ranges.emplace(j, std::move(computed)).first->second;
  };

  std::vector<Rule> rules;
  for (const auto& [k, j] : space.known()) {
    const auto& f = space.dependency(k, j);
    for (const auto& range : ranges_for(j)) {
      rules.push_back(Rule{j, k, range, quantify_parameter(f, range.min(), range.max())});
    }
  }
  return rules;
}

namespace {

// Local-name fragment for a range bound: integers print plainly, other values
// use their shortest round-trip form with '-' -> 'm' and '.' -> 'p'.
std::string bound_token(double value) {
  std::string out;
  if (std::abs(value) < 1e15 && value == std::floor(value)) {
    out = std::to_string(static_cast<long long>(value));
  } else {
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    out.assign(buffer, result.ptr);
  }
  std::string cleaned;
  for (char c : out) {
    if (c == '-') cleaned += 'm';
    else if (c == '.') cleaned += 'p';
    else if (c != '+') cleaned += c;
  }
  return cleaned;
}

std::string rule_suffix(const Rule& rule) {
  return std::to_string(rule.quality) + "_" + std::to_string(rule.parameter) + "_" +
         bound_token(rule.condition.min()) + "_" + bound_token(rule.condition.max());
}

class GraphBuilder {
 public:
  explicit GraphBuilder(Representation representation) : kg_(representation) {}

  EntityId entity(const std::string& local) { return kg_.add_entity(vocab::entity_iri(local)); }
  RelationId relation(std::string_view local) {
    return kg_.add_relation(vocab::relation_iri(local));
  }
  void link(EntityId head, std::string_view rel, EntityId tail) {
    kg_.add_triple(head, relation(rel), tail);
  }
  void literal(EntityId head, std::string_view rel, double value) {
    kg_.add_triple(head, relation(rel), Literal{value});
  }
  void condition_literals(EntityId node, const Rule& rule) {
    literal(node, vocab::kConditionLower, rule.condition.min());
    literal(node, vocab::kConditionUpper, rule.condition.max());
  }

  KnowledgeGraph take() { return std::move(kg_); }

 private:
  KnowledgeGraph kg_;
};

}  // namespace

KnowledgeGraph build_kg(std::span<const Rule> rules, Representation representation) {
  if (rules.empty()) throw EmptyRuleSetError("cannot build a knowledge graph from no rules");
  GraphBuilder g(representation);
  for (const auto& rule : rules) {
    const auto q = g.entity("q_" + std::to_string(rule.quality));
    const auto p = g.entity("p_" + std::to_string(rule.parameter));
    const auto suffix = rule_suffix(rule);
    switch (representation) {
      case Representation::ch_e: {
        const auto adj = g.entity("adj_" + suffix);
        g.link(q, vocab::kHasCondition, adj);
        g.link(adj, vocab::kAdjusts, p);
        g.literal(adj, vocab::kRhoHat, rule.rho_hat);
        g.condition_literals(adj, rule);
        break;
      }
      case Representation::ch_e_eta: {
        const auto adj = g.entity("adj_" + suffix);
        g.link(q, vocab::kImplies, adj);
        g.link(adj, vocab::kAdjusts, p);
        g.link(q, vocab::kImplies, p);
        g.literal(adj, vocab::kRhoHat, rule.rho_hat);
        g.condition_literals(adj, rule);
        break;
      }
      case Representation::ch_l_eta: {
        const auto lit = g.entity("lit_" + suffix);
        g.link(q, vocab::kImplies, p);
        g.link(q, vocab::kHasQuantification, lit);
        g.link(lit, vocab::kOnParameter, p);
        g.literal(lit, vocab::kRhoHat, rule.rho_hat);
        g.condition_literals(lit, rule);
        break;
      }
      case Representation::rei_e: {
        const auto st = g.entity("st_" + suffix);
        const auto quant = g.entity("quant_" + suffix);
        g.link(st, vocab::kHasCondition, q);
        g.link(st, vocab::kHasAdjustment, quant);
        g.link(st, vocab::kOnParameter, p);
        g.literal(quant, vocab::kRhoHat, rule.rho_hat);
        g.condition_literals(st, rule);
        break;
      }
    }
  }
  return g.take();
}

std::size_t entity_index(std::string_view iri) {
  const auto underscore = iri.rfind('_');
  std::size_t value = 0;
  if (underscore == std::string_view::npos ||
      std::from_chars(iri.data() + underscore + 1, iri.data() + iri.size(), value).ec !=
          std::errc{}) {
    throw ParseError("no index in IRI " + std::string(iri));
  }
  return value;
}

std::vector<Rule> rules_from_kg(const KnowledgeGraph& kg) {
  struct Partial {
    std::optional<std::size_t> quality, parameter;
    std::optional<double> lower, upper, rho_hat;
    std::optional<EntityId> quantity;
  };
  auto is_rule_node = [&](EntityId id) {
    const auto kind = kg.entity_kind(id);
    return kind == EntityKind::adjustment || kind == EntityKind::statement ||
           kind == EntityKind::annotation;
  };
  const auto rho_iri = vocab::relation_iri(vocab::kRhoHat);
  const auto lower_iri = vocab::relation_iri(vocab::kConditionLower);
  const auto upper_iri = vocab::relation_iri(vocab::kConditionUpper);

  std::map<EntityId, Partial> nodes;
  std::map<EntityId, double> quantity_values;
  auto attach = [&](EntityId node, EntityId other) {
    auto& partial = nodes[node];
    switch (kg.entity_kind(other)) {
      case EntityKind::quality: partial.quality = entity_index(kg.entity_iri(other)); break;
      case EntityKind::parameter: partial.parameter = entity_index(kg.entity_iri(other)); break;
      case EntityKind::quantity: partial.quantity = other; break;
      default: break;
    }
  };
  for (const auto& t : kg.triples()) {
    if (!t.tail_is_entity()) {
      const double value = std::get<Literal>(t.tail).value;
      const auto& rel = kg.relation_iri(t.relation);
      if (kg.entity_kind(t.head) == EntityKind::quantity && rel == rho_iri) {
        quantity_values[t.head] = value;
        continue;
      }
      if (!is_rule_node(t.head)) continue;
      auto& partial = nodes[t.head];
      if (rel == rho_iri) partial.rho_hat = value;
      else if (rel == lower_iri) partial.lower = value;
      else if (rel == upper_iri) partial.upper = value;
      continue;
    }
    if (is_rule_node(t.head)) attach(t.head, t.tail_entity());
    if (is_rule_node(t.tail_entity())) attach(t.tail_entity(), t.head);
  }

  std::vector<Rule> rules;
  for (auto& [id, partial] : nodes) {
    if (partial.quantity) {
      auto it = quantity_values.find(*partial.quantity);
      if (it != quantity_values.end()) partial.rho_hat = it->second;
    }
    if (!partial.quality || !partial.parameter || !partial.lower || !partial.upper ||
        !partial.rho_hat) {
      throw ParseError("incomplete rule encoding at " + kg.entity_iri(id));
    }
    rules.push_back(Rule{*partial.quality, *partial.parameter,
                         ValueRange(*partial.lower, *partial.upper), *partial.rho_hat});
  }
  std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
    return std::tuple(a.parameter, a.quality, a.condition.min()) <
           std::tuple(b.parameter, b.quality, b.condition.min());
  });
  return rules;
}

}  // namespace pdpk
