#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pdpk/config.hpp"
#include "pdpk/knowledge_graph.hpp"
#include "pdpk/pq_space.hpp"

namespace pdpk {

// One unit of procedural knowledge: while quality j lies in `condition`,
// adjust parameter k by `rho_hat` per unit of quality improvement.
struct Rule {
  std::size_t quality = 0;
  std::size_t parameter = 0;
  ValueRange condition{0.0, 1.0};
  double rho_hat = 0.0;

  bool operator==(const Rule&) const = default;
};

// Mean unit-step change of the inverse dependency over [lower, upper]:
//   sum_s (f^{-1}(s) - f^{-1}(s+1)) / (|d_q| - 1)
// with s stepping over integers for integer bounds. Non-integer ranges are
// sampled at ceil(upper - lower) + 1 evenly spaced points.
double quantify_parameter(const DependencyFunction& f, double lower, double upper);

struct ConditionStrategy {
  ConditionStrategyKind kind = ConditionStrategyKind::fixed_count;
  std::size_t bins = 1;  // fixed_count only

  static ConditionStrategy fixed_count(std::size_t bins) {
    return {ConditionStrategyKind::fixed_count, bins};
  }
  static ConditionStrategy freedman_diaconis() {
    return {ConditionStrategyKind::freedman_diaconis, 0};
  }
};

// Quartile with linear interpolation between order statistics, q in [0, 1].
double quantile(std::vector<double> samples, double q);

// Contiguous equal-width partition of the quality domain. Freedman-Diaconis
// uses bin width 2 * IQR * m^(-1/3) over the m observed `samples` and throws
// EstimatorError when the IQR vanishes or fewer than 2 samples exist.
std::vector<ValueRange> quantify_conditions(const Quality& quality,
                                            const ConditionStrategy& strategy,
                                            std::span<const double> samples = {});

// One rule per known dependency and condition range. `samples` holds the
// observed values per quality for Freedman-Diaconis; estimator failures fall
// back to a single range and are appended to `warnings`.
std::vector<Rule> extract_rules(const PQSpace& space, const ConditionStrategy& strategy,
                                const std::vector<std::vector<double>>* samples = nullptr,
                                std::vector<std::string>* warnings = nullptr);

// Renders rules under one representation pattern. With R rules over V0
// distinct parameters and qualities the entity graph has
//   ch_e:     2R edges, V0 + R vertices, 2 relations
//   ch_e_eta: 3R edges, V0 + R vertices, 2 relations
//   ch_l_eta:  R edges, V0 vertices,     1 relation
//   rei_e:    3R edges, V0 + 2R vertices, 3 relations
// (edge identities assume one rule per known pair).
KnowledgeGraph build_kg(std::span<const Rule> rules, Representation representation);

// Recovers the rules encoded in a graph of any representation, sorted by
// (parameter, quality, lower bound).
std::vector<Rule> rules_from_kg(const KnowledgeGraph& kg);

// Index encoded in a p_<k> / q_<j> IRI.
std::size_t entity_index(std::string_view iri);

}  // namespace pdpk
