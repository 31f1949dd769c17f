#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdpk/config.hpp"
#include "pdpk/pq_space.hpp"
#include "pdpk/random.hpp"

namespace pdpk {

struct ProcessIteration {
  std::size_t index = 0;
  std::vector<double> parametrisation;  // one value per parameter
  std::vector<double> qualities;        // one value per quality
  double score = 0.0;

  bool operator==(const ProcessIteration&) const = default;
};

struct ParametrisationProcess {
  std::size_t id = 0;
  Behaviour behaviour = Behaviour::exploitative;
  std::vector<std::size_t> q_opt;  // ascending quality ids
  double threshold = 0.0;
  std::vector<ProcessIteration> iterations;
  bool converged = false;

  bool operator==(const ParametrisationProcess&) const = default;
};

// Trial-and-error state of an explorative operator. `last_score` is the
// score observed when the active parameter was last adjusted.
struct ExplorationState {
  std::size_t active_parameter = 0;
  int direction = 1;  // lambda, -1 or +1
  std::optional<double> last_score;
};

// Mean of f_{k,j}(rho_k) over the parameters affecting each quality, clamped
// to the quality domain; unaffected qualities sit at their optimum.
std::vector<double> compute_quality(const PQSpace& space,
                                    std::span<const double> parametrisation);

// Adds N(0, (sigma_rel * width)^2) per quality and clamps.
std::vector<double> apply_noise(const PQSpace& space,
                                std::span<const double> qualities,
                                double sigma_rel, SeededRandom& rng);

// Phi: mean normalised defect over q_opt; 0 is optimal, 1 worst.
double score(std::span<const double> qualities,
             std::span<const std::size_t> q_opt, const PQSpace& space);

// Expert update: every parameter with known dependencies on still-defective
// targeted qualities moves against the mean inverse slope.
std::vector<double> exploit_step(const PQSpace& space,
                                 const ProcessIteration& previous,
                                 std::span<const std::size_t> q_opt,
                                 double threshold);

ExplorationState initial_exploration_state(const PQSpace& space,
                                           SeededRandom& rng);

// Moves the active parameter by 0.1 * width * lambda after updating the
// state from the score change the previous adjustment caused:
// improved -> keep going, worsened -> reverse, unchanged -> next parameter.
std::pair<std::vector<double>, ExplorationState> explore_step(
    const PQSpace& space, const ProcessIteration& previous,
    const ExplorationState& state, SeededRandom& rng);

// One mitigation episode. The first recorded iteration is the initial,
// defective parametrisation.
ParametrisationProcess run_parametrisation_process(const PQSpace& space,
                                                   Behaviour behaviour,
                                                   const GeneratorConfig& config,
                                                   SeededRandom& rng,
                                                   std::size_t id = 0);

// Episodes until config.total_iterations is reached; the last one is kept
// whole.
std::vector<ParametrisationProcess> generate_processes(
    const PQSpace& space, const GeneratorConfig& config, SeededRandom& rng);

}  // namespace pdpk
