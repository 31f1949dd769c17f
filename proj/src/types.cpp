#include "pdpk/types.hpp"

#include <cmath>
#include <sstream>

#include "pdpk/errors.hpp"

namespace pdpk {

ValueRange::ValueRange(double min, double max) : min_(min), max_(max) {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    std::ostringstream msg;
    msg << "invalid range [" << min << ", " << max << "]: need min < max";
    throw DomainError(msg.str());
  }
}

bool ValueRange::contains(double value, double rel_tol) const {
  const double slack = rel_tol * width();
  return value >= min_ - slack && value <= max_ + slack;
}

double ValueRange::clamp(double value) const {
  if (value < min_) return min_;
  if (value > max_) return max_;
  return value;
}

std::string_view to_string(DependencyKind kind) {
  switch (kind) {
    case DependencyKind::linear: return "linear";
    case DependencyKind::quadratic: return "quadratic";
    case DependencyKind::logarithmic: return "logarithmic";
  }
  return "?";
}

std::string_view to_string(Behaviour behaviour) {
  return behaviour == Behaviour::exploitative ? "exploitative" : "explorative";
}

std::string_view to_string(Representation representation) {
  switch (representation) {
    case Representation::ch_e: return "ch_e";
    case Representation::ch_e_eta: return "ch_e_eta";
    case Representation::ch_l_eta: return "ch_l_eta";
    case Representation::rei_e: return "rei_e";
  }
  return "?";
}

std::optional<DependencyKind> parse_dependency_kind(std::string_view text) {
  for (auto kind : kAllDependencyKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<Behaviour> parse_behaviour(std::string_view text) {
  if (text == "exploitative") return Behaviour::exploitative;
  if (text == "explorative") return Behaviour::explorative;
  return std::nullopt;
}

std::optional<Representation> parse_representation(std::string_view text) {
  for (auto rep : kAllRepresentations) {
    if (to_string(rep) == text) return rep;
  }
  return std::nullopt;
}

}  // namespace pdpk
