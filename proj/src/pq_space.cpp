#include "pdpk/pq_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdpk/errors.hpp"

namespace pdpk {

namespace {

constexpr double kDomainTolerance = 1e-9;
constexpr double kFlatSlope = 1e-12;

std::string out_of_range_message(const char* what, double value,
                                 const ValueRange& range) {
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " " << value << " outside [" << range.min() << ", "
      << range.max() << "]";
  return msg.str();
}

}  // namespace

DependencyFunction::DependencyFunction(DependencyKind kind,
                                       std::vector<double> coefficients,
                                       ValueRange source, ValueRange target,
                                       bool increasing)
    : kind_(kind),
      coefficients_(std::move(coefficients)),
      source_(source),
      target_(target),
      increasing_(increasing) {}

DependencyFunction DependencyFunction::linear(ValueRange source,
                                              ValueRange target,
                                              bool increasing) {
  const double start = increasing ? target.min() : target.max();
  const double end = increasing ? target.max() : target.min();
  const double a = (end - start) / source.width();
  const double b = start - a * source.min();
  return DependencyFunction(DependencyKind::linear, {a, b}, source, target,
                            increasing);
}

DependencyFunction DependencyFunction::quadratic(ValueRange source,
                                                 ValueRange target,
                                                 double vertex,
                                                 bool increasing) {
  if (vertex > source.min() && vertex < source.max()) {
    throw DomainError("quadratic vertex must lie at or outside the source domain");
  }
  const double start = increasing ? target.min() : target.max();
  const double end = increasing ? target.max() : target.min();
  const double lo = (source.min() - vertex) * (source.min() - vertex);
  const double hi = (source.max() - vertex) * (source.max() - vertex);
  const double a = (end - start) / (hi - lo);
  const double c = start - a * lo;
  return DependencyFunction(DependencyKind::quadratic, {a, vertex, c}, source,
                            target, increasing);
}

DependencyFunction DependencyFunction::logarithmic(ValueRange source,
                                                   ValueRange target,
                                                   double shift,
                                                   bool increasing) {
  if (!(shift < source.min())) {
    throw DomainError("logarithm shift must lie below the source domain");
  }
  const double start = increasing ? target.min() : target.max();
  const double end = increasing ? target.max() : target.min();
  const double lo = std::log(source.min() - shift);
  const double hi = std::log(source.max() - shift);
  const double a = (end - start) / (hi - lo);
  const double b = start - a * lo;
  return DependencyFunction(DependencyKind::logarithmic, {a, shift, b}, source,
                            target, increasing);
}

double DependencyFunction::evaluate(double p) const {
  const auto& c = coefficients_;
  switch (kind_) {
    case DependencyKind::linear: return c[0] * p + c[1];
    case DependencyKind::quadratic: return c[0] * (p - c[1]) * (p - c[1]) + c[2];
    case DependencyKind::logarithmic: return c[0] * std::log(p - c[1]) + c[2];
  }
  return 0.0;
}

double DependencyFunction::forward(double p) const {
  if (!source_.contains(p, kDomainTolerance)) {
    throw DomainError(out_of_range_message("parameter value", p, source_));
  }
  return target_.clamp(evaluate(source_.clamp(p)));
}

double DependencyFunction::inverse(double q) const {
  if (!target_.contains(q, kDomainTolerance)) {
    throw DomainError(out_of_range_message("quality value", q, target_));
  }
  q = target_.clamp(q);
  const auto& c = coefficients_;
  double p = 0.0;
  switch (kind_) {
    case DependencyKind::linear:
      p = (q - c[1]) / c[0];
      break;
    case DependencyKind::quadratic: {
      const double offset = std::sqrt(std::max(0.0, (q - c[2]) / c[0]));
      p = c[1] <= source_.min() ? c[1] + offset : c[1] - offset;
      break;
    }
    case DependencyKind::logarithmic:
      p = c[1] + std::exp((q - c[2]) / c[0]);
      break;
  }
  return source_.clamp(p);
}

double DependencyFunction::derivative(double p) const {
  if (!source_.contains(p, kDomainTolerance)) {
    throw DomainError(out_of_range_message("parameter value", p, source_));
  }
  p = source_.clamp(p);
  const auto& c = coefficients_;
  switch (kind_) {
    case DependencyKind::linear: return c[0];
    case DependencyKind::quadratic: return 2.0 * c[0] * (p - c[1]);
    case DependencyKind::logarithmic: return c[0] / (p - c[1]);
  }
  return 0.0;
}

double DependencyFunction::inverse_derivative(double q) const {
  const double slope = derivative(inverse(q));
  if (std::abs(slope) < kFlatSlope) {
    std::ostringstream msg;
    msg << "inverse derivative undefined at q = " << q << " (flat dependency)";
    throw SingularityError(msg.str());
  }
  return 1.0 / slope;
}

PQSpace::PQSpace(std::vector<Parameter> parameters,
                 std::vector<Quality> qualities,
                 std::map<PairKey, DependencyFunction> dependencies,
                 std::set<PairKey> known)
    : parameters_(std::move(parameters)),
      qualities_(std::move(qualities)),
      dependencies_(std::move(dependencies)),
      known_(std::move(known)),
      affecting_(qualities_.size()),
      affected_(parameters_.size()) {
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    if (parameters_[k].id != k) throw DomainError("parameter ids must be contiguous");
  }
  for (std::size_t j = 0; j < qualities_.size(); ++j) {
    if (qualities_[j].id != j) throw DomainError("quality ids must be contiguous");
  }
  for (const auto& [key, f] : dependencies_) {
    const auto [k, j] = key;
    if (k >= parameters_.size() || j >= qualities_.size()) {
      throw DomainError("dependency references an unknown parameter or quality");
    }
    affecting_[j].push_back(k);
    affected_[k].push_back(j);
  }
  for (const auto& key : known_) {
    if (!dependencies_.contains(key)) {
      throw DomainError("known pair without a causal dependency");
    }
  }
  for (std::size_t k = 0; k < parameters_.size(); ++k) {
    if (!affected_[k].empty()) adjustable_.push_back(k);
  }
  for (std::size_t j = 0; j < qualities_.size(); ++j) {
    if (!affecting_[j].empty()) affected_quality_ids_.push_back(j);
  }
}

const DependencyFunction& PQSpace::dependency(std::size_t k,
                                              std::size_t j) const {
  auto it = dependencies_.find({k, j});
  if (it == dependencies_.end()) {
    throw UnknownIdError("no dependency between p_" + std::to_string(k) +
                         " and q_" + std::to_string(j));
  }
  return it->second;
}

bool PQSpace::has_dependency(std::size_t k, std::size_t j) const {
  return dependencies_.contains({k, j});
}

bool PQSpace::is_known(std::size_t k, std::size_t j) const {
  return known_.contains({k, j});
}

std::size_t share_count(double share, std::size_t total) {
  return static_cast<std::size_t>(std::llround(share * static_cast<double>(total)));
}

namespace {

// Per-parameter quality sets honouring [fanout_min, fanout_max]; trimmed or
// padded towards `target` total dependencies. The per-parameter bounds win
// over the global count when both cannot hold.
std::vector<std::set<std::size_t>> sample_fanout(std::size_t p_count,
                                                 std::size_t q_count,
                                                 std::size_t fanout_min,
                                                 std::size_t fanout_max,
                                                 std::size_t target,
                                                 SeededRandom& rng) {
  std::vector<std::set<std::size_t>> chosen(p_count);
  std::size_t total = 0;
  for (std::size_t k = 0; k < p_count; ++k) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(
        static_cast<std::int64_t>(fanout_min), static_cast<std::int64_t>(fanout_max)));
    for (auto j : rng.sample_without_replacement(q_count, n)) chosen[k].insert(j);
    total += n;
  }

  auto removable = [&](std::size_t k) {
    const std::size_t n = chosen[k].size();
    return n == 1 || n - 1 >= fanout_min;
  };

  while (total > target) {
    std::vector<PairKey> candidates;
    for (std::size_t k = 0; k < p_count; ++k) {
      if (!removable(k)) continue;
      for (auto j : chosen[k]) candidates.emplace_back(k, j);
    }
    if (candidates.empty()) break;
    const auto [k, j] = candidates[rng.uniform_index(candidates.size())];
    chosen[k].erase(j);
    --total;
  }
  // Whole parameters sitting exactly at fanout_min can only leave together.
  while (total > target) {
    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < p_count; ++k) {
      if (!chosen[k].empty() && total - chosen[k].size() >= target) {
        candidates.push_back(k);
      }
    }
    if (candidates.empty()) break;
    const auto k = candidates[rng.uniform_index(candidates.size())];
    total -= chosen[k].size();
    chosen[k].clear();
  }

  while (total < target) {
    std::vector<PairKey> candidates;
    for (std::size_t k = 0; k < p_count; ++k) {
      const std::size_t n = chosen[k].size();
      if (n >= fanout_max || (n == 0 && fanout_min > 1)) continue;
      for (std::size_t j = 0; j < q_count; ++j) {
        if (!chosen[k].contains(j)) candidates.emplace_back(k, j);
      }
    }
    if (candidates.empty()) break;
    const auto [k, j] = candidates[rng.uniform_index(candidates.size())];
    chosen[k].insert(j);
    ++total;
  }
  while (total < target && target - total >= fanout_min) {
    std::vector<std::size_t> empty;
    for (std::size_t k = 0; k < p_count; ++k) {
      if (chosen[k].empty()) empty.push_back(k);
    }
    if (empty.empty()) break;
    const auto k = empty[rng.uniform_index(empty.size())];
    for (auto j : rng.sample_without_replacement(q_count, fanout_min)) {
      chosen[k].insert(j);
    }
    total += fanout_min;
  }
  return chosen;
}

DependencyFunction sample_function(DependencyKind kind, ValueRange source,
                                   ValueRange target, SeededRandom& rng) {
  const bool increasing = rng.bernoulli(0.5);
  switch (kind) {
    case DependencyKind::linear:
      return DependencyFunction::linear(source, target, increasing);
    case DependencyKind::quadratic: {
      const bool vertex_below = rng.bernoulli(0.5);
      const double offset = rng.uniform(0.25, 1.0) * source.width();
      const double vertex =
          vertex_below ? source.min() - offset : source.max() + offset;
      return DependencyFunction::quadratic(source, target, vertex, increasing);
    }
    case DependencyKind::logarithmic: {
      const double offset = rng.uniform(0.25, 1.0) * source.width();
      return DependencyFunction::logarithmic(source, target,
                                             source.min() - offset, increasing);
    }
  }
  throw DomainError("unknown dependency kind");
}

}  // namespace

PQSpace build_pq_space(const GeneratorConfig& config, SeededRandom& rng) {
  config.validate();
  const std::size_t p_count = config.p_count;
  const std::size_t q_count = config.q_count;
  if (config.fanout_min > q_count) {
    throw ConfigError("/fanout_min: exceeds the number of qualities");
  }
  const std::size_t fanout_max = std::min(config.fanout_max, q_count);
  const std::size_t target = share_count(config.pq_causal_share, p_count * q_count);
  if (target > 0) {
    // Feasible iff some number m of causal parameters satisfies
    // m * fanout_min <= target <= m * fanout_max with m <= |P|.
    const std::size_t m = (target + fanout_max - 1) / fanout_max;
    if (m > p_count || m * config.fanout_min > target) {
      throw ConfigError(
          "/pq_causal_share: unreachable under the fan-out bounds (" +
          std::to_string(target) + " dependencies requested)");
    }
  }

  std::vector<Parameter> parameters;
  for (std::size_t k = 0; k < p_count; ++k) {
    parameters.push_back({k, "p_" + std::to_string(k), config.parameter_domain(k)});
  }
  std::vector<Quality> qualities;
  for (std::size_t j = 0; j < q_count; ++j) {
    qualities.push_back({j, "q_" + std::to_string(j), config.quality_domain(j)});
  }

  std::map<PairKey, DependencyFunction> dependencies;
  if (target > 0) {
    const auto chosen = sample_fanout(p_count, q_count, config.fanout_min,
                                      fanout_max, target, rng);
    for (std::size_t k = 0; k < p_count; ++k) {
      for (auto j : chosen[k]) {
        const auto kind =
            config.function_kinds[rng.uniform_index(config.function_kinds.size())];
        dependencies.emplace(PairKey{k, j},
                             sample_function(kind, parameters[k].domain,
                                             qualities[j].domain, rng));
      }
    }
  }

  std::vector<PairKey> keys;
  for (const auto& entry : dependencies) keys.push_back(entry.first);
  std::set<PairKey> known;
  const std::size_t known_count = share_count(config.pq_known_share, keys.size());
  for (auto index : rng.sample_without_replacement(keys.size(), known_count)) {
    known.insert(keys[index]);
  }
  return PQSpace(std::move(parameters), std::move(qualities),
                 std::move(dependencies), std::move(known));
}

}  // namespace pdpk
