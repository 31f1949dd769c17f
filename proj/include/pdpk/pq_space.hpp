#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdpk/config.hpp"
#include "pdpk/random.hpp"
#include "pdpk/types.hpp"

namespace pdpk {

struct Parameter {
  std::size_t id;
  std::string name;
  ValueRange domain;
};

struct Quality {
  std::size_t id;
  std::string name;
  ValueRange domain;  // domain.min() is the defect-free optimum
};

// Strictly monotone map from a parameter domain onto a quality domain. The
// coefficients are solved so that the source endpoints land exactly on the
// target endpoints, which makes the function invertible and onto.
//
// Coefficient layout per kind:
//   linear       {a, b}     f(p) = a*p + b
//   quadratic    {a, v, c}  f(p) = a*(p - v)^2 + c, vertex v outside (min, max)
//   logarithmic  {a, s, b}  f(p) = a*ln(p - s) + b, shift s < min
class DependencyFunction {
 public:
  static DependencyFunction linear(ValueRange source, ValueRange target,
                                   bool increasing);
  static DependencyFunction quadratic(ValueRange source, ValueRange target,
                                      double vertex, bool increasing);
  static DependencyFunction logarithmic(ValueRange source, ValueRange target,
                                        double shift, bool increasing);

  DependencyKind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  const ValueRange& source() const { return source_; }
  const ValueRange& target() const { return target_; }
  bool increasing() const { return increasing_; }

  // Throw DomainError when the argument lies outside the respective domain.
  double forward(double p) const;
  double inverse(double q) const;
  double derivative(double p) const;
  // d/dq f^{-1}(q) = 1 / f'(f^{-1}(q)); throws SingularityError on a flat spot.
  double inverse_derivative(double q) const;

 private:
  DependencyFunction(DependencyKind kind, std::vector<double> coefficients,
                     ValueRange source, ValueRange target, bool increasing);

  double evaluate(double p) const;

  DependencyKind kind_;
  std::vector<double> coefficients_;
  ValueRange source_;
  ValueRange target_;
  bool increasing_;
};

// (parameter k, quality j)
using PairKey = std::pair<std::size_t, std::size_t>;

// The ground truth of the simulation: parameters, qualities and the causal
// dependency functions between them, some of which are known to the expert.
class PQSpace {
 public:
  PQSpace(std::vector<Parameter> parameters, std::vector<Quality> qualities,
          std::map<PairKey, DependencyFunction> dependencies,
          std::set<PairKey> known);

  const std::vector<Parameter>& parameters() const { return parameters_; }
  const std::vector<Quality>& qualities() const { return qualities_; }
  const std::map<PairKey, DependencyFunction>& dependencies() const {
    return dependencies_;
  }
  const std::set<PairKey>& known() const { return known_; }

  const DependencyFunction& dependency(std::size_t k, std::size_t j) const;
  bool has_dependency(std::size_t k, std::size_t j) const;
  bool is_known(std::size_t k, std::size_t j) const;

  // P_{q_j}
  const std::vector<std::size_t>& affecting_parameters(std::size_t j) const {
    return affecting_.at(j);
  }
  const std::vector<std::size_t>& affected_qualities(std::size_t k) const {
    return affected_.at(k);
  }
  // Parameters with at least one dependency, ascending.
  const std::vector<std::size_t>& adjustable_parameters() const {
    return adjustable_;
  }
  // Qualities with at least one affecting parameter, ascending.
  const std::vector<std::size_t>& affected_quality_ids() const {
    return affected_quality_ids_;
  }

 private:
  std::vector<Parameter> parameters_;
  std::vector<Quality> qualities_;
  std::map<PairKey, DependencyFunction> dependencies_;
  std::set<PairKey> known_;
  std::vector<std::vector<std::size_t>> affecting_;
  std::vector<std::vector<std::size_t>> affected_;
  std::vector<std::size_t> adjustable_;
  std::vector<std::size_t> affected_quality_ids_;
};

// Round half away from zero, the convention for every share-to-count
// conversion in the generator.
std::size_t share_count(double share, std::size_t total);

// Samples a space satisfying the causal share, known share and per-parameter
// fan-out bounds of `config`. Throws ConfigError when they are inconsistent.
PQSpace build_pq_space(const GeneratorConfig& config, SeededRandom& rng);

}  // namespace pdpk
