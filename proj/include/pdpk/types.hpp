#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace pdpk {

// Closed interval [min, max] with min < max.
class ValueRange {
 public:
  ValueRange(double min, double max);

  double min() const { return min_; }
  double max() const { return max_; }
  double width() const { return max_ - min_; }

  // Tolerates excursions of rel_tol * width caused by rounding.
  bool contains(double value, double rel_tol = 1e-9) const;
  double clamp(double value) const;

  auto operator<=>(const ValueRange&) const = default;

 private:
  double min_;
  double max_;
};

enum class DependencyKind { linear, quadratic, logarithmic };
inline constexpr std::array kAllDependencyKinds = {
    DependencyKind::linear, DependencyKind::quadratic,
    DependencyKind::logarithmic};

enum class Behaviour { exploitative, explorative };

// Knowledge-graph representation patterns:
//   ch_e      chained binary relation, quantification as entity
//   ch_e_eta  ch_e plus the unquantified quality->parameter `implies` edge
//   ch_l_eta  `implies` edge with the quantification attached as literals
//   rei_e     reified rule statement, quantification as entity
enum class Representation { ch_e, ch_e_eta, ch_l_eta, rei_e };
inline constexpr std::array kAllRepresentations = {
    Representation::ch_e, Representation::ch_e_eta, Representation::ch_l_eta,
    Representation::rei_e};

std::string_view to_string(DependencyKind kind);
std::string_view to_string(Behaviour behaviour);
std::string_view to_string(Representation representation);

std::optional<DependencyKind> parse_dependency_kind(std::string_view text);
std::optional<Behaviour> parse_behaviour(std::string_view text);
std::optional<Representation> parse_representation(std::string_view text);

}  // namespace pdpk
