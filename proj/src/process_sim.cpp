#include "pdpk/process_sim.hpp"

#include <algorithm>
#include <cmath>

#include "pdpk/errors.hpp"

namespace pdpk {

namespace {

constexpr double kUnchangedScore = 1e-9;
constexpr std::size_t kMaxInitialisationAttempts = 1000;

double normalised_defect(const Quality& quality, double value) {
  return (value - quality.domain.min()) / quality.domain.width();
}

}  // namespace

std::vector<double> compute_quality(const PQSpace& space,
                                    std::span<const double> parametrisation) {
  const auto& qualities = space.qualities();
  std::vector<double> out(qualities.size());
  for (std::size_t j = 0; j < qualities.size(); ++j) {
    const auto& affecting = space.affecting_parameters(j);
    if (affecting.empty()) {
      out[j] = qualities[j].domain.min();
      continue;
    }
    double sum = 0.0;
    for (auto k : affecting) {
      sum += space.dependency(k, j).forward(parametrisation[k]);
    }
    out[j] = qualities[j].domain.clamp(sum / static_cast<double>(affecting.size()));
  }
  return out;
}

std::vector<double> apply_noise(const PQSpace& space,
                                std::span<const double> qualities,
                                double sigma_rel, SeededRandom& rng) {
  std::vector<double> out(qualities.begin(), qualities.end());
  if (sigma_rel == 0.0) return out;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto& domain = space.qualities()[j].domain;
    out[j] = domain.clamp(out[j] + rng.normal(0.0, sigma_rel * domain.width()));
  }
  return out;
}

double score(std::span<const double> qualities,
             std::span<const std::size_t> q_opt, const PQSpace& space) {
  if (q_opt.empty()) throw EmptyTargetError("score over an empty Q_opt");
  double sum = 0.0;
  for (auto j : q_opt) sum += normalised_defect(space.qualities()[j], qualities[j]);
  return sum / static_cast<double>(q_opt.size());
}

std::vector<double> exploit_step(const PQSpace& space,
                                 const ProcessIteration& previous,
                                 std::span<const std::size_t> q_opt,
                                 double threshold) {
  std::vector<double> next = previous.parametrisation;
  for (std::size_t k = 0; k < space.parameters().size(); ++k) {
    double delta = 0.0;
    std::size_t adjustable = 0;  // |Q_adj,p_k|
    for (auto j : q_opt) {
      if (!space.is_known(k, j)) continue;
      ++adjustable;
      const double value = previous.qualities[j];
      if (normalised_defect(space.qualities()[j], value) <= threshold) continue;
      delta += space.dependency(k, j).inverse_derivative(value);
    }
    if (adjustable == 0) continue;
    delta /= static_cast<double>(adjustable);
    next[k] = space.parameters()[k].domain.clamp(next[k] - delta);
  }
  return next;
}

ExplorationState initial_exploration_state(const PQSpace& space,
                                           SeededRandom& rng) {
  const auto& adjustable = space.adjustable_parameters();
  if (adjustable.empty()) {
    throw NoAdjustableParameterError("no parameter has a causal dependency");
  }
  ExplorationState state;
  state.active_parameter = adjustable[rng.uniform_index(adjustable.size())];
  state.direction = rng.bernoulli(0.5) ? 1 : -1;
  return state;
}

std::pair<std::vector<double>, ExplorationState> explore_step(
    const PQSpace& space, const ProcessIteration& previous,
    const ExplorationState& state, SeededRandom& rng) {
  const auto& adjustable = space.adjustable_parameters();
  if (adjustable.empty()) {
    throw NoAdjustableParameterError("no parameter has a causal dependency");
  }
  ExplorationState next_state = state;
  if (state.last_score) {
    const double change = previous.score - *state.last_score;
    if (change > kUnchangedScore) {
      next_state.direction = -state.direction;
    } else if (change >= -kUnchangedScore) {
      auto it = std::upper_bound(adjustable.begin(), adjustable.end(),
                                 state.active_parameter);
      next_state.active_parameter = it == adjustable.end() ? adjustable.front() : *it;
      next_state.direction = rng.bernoulli(0.5) ? 1 : -1;
    }
  }
  next_state.last_score = previous.score;

  std::vector<double> next = previous.parametrisation;
  const auto k = next_state.active_parameter;
  const auto& domain = space.parameters()[k].domain;
  // Delta rho = -0.1 * |d| * lambda, subtracted from the previous value.
  const double delta = -0.1 * domain.width() * next_state.direction;
  next[k] = domain.clamp(next[k] - delta);
  return {std::move(next), next_state};
}

namespace {

ProcessIteration make_iteration(const PQSpace& space, std::size_t index,
                                std::vector<double> parametrisation,
                                std::span<const std::size_t> q_opt,
                                const GeneratorConfig& config,
                                SeededRandom& rng) {
  ProcessIteration iteration;
  iteration.index = index;
  iteration.qualities = compute_quality(space, parametrisation);
  if (config.noise_sigma_rel > 0.0) {
    iteration.qualities =
        apply_noise(space, iteration.qualities, config.noise_sigma_rel, rng);
  }
  iteration.parametrisation = std::move(parametrisation);
  iteration.score = score(iteration.qualities, q_opt, space);
  return iteration;
}

std::vector<std::size_t> sample_q_opt(const PQSpace& space,
                                      const GeneratorConfig& config,
                                      SeededRandom& rng) {
  // Only qualities some parameter affects can be defective.
  const auto& candidates = space.affected_quality_ids();
  const std::size_t upper = std::min(config.q_opt_size_max, candidates.size());
  const std::size_t lower = std::min(config.q_opt_size_min, upper);
  const auto size = static_cast<std::size_t>(rng.uniform_int(
      static_cast<std::int64_t>(lower), static_cast<std::int64_t>(upper)));
  std::vector<std::size_t> q_opt;
  for (auto index : rng.sample_without_replacement(candidates.size(), size)) {
    q_opt.push_back(candidates[index]);
  }
  std::sort(q_opt.begin(), q_opt.end());
  return q_opt;
}

}  // namespace

ParametrisationProcess run_parametrisation_process(const PQSpace& space,
                                                   Behaviour behaviour,
                                                   const GeneratorConfig& config,
                                                   SeededRandom& rng,
                                                   std::size_t id) {
  if (space.dependencies().empty()) {
    throw NoAdjustableParameterError("the space has no causal dependency");
  }
  ParametrisationProcess process;
  process.id = id;
  process.behaviour = behaviour;
  process.threshold = config.threshold;
  process.q_opt = sample_q_opt(space, config, rng);

  const auto& parameters = space.parameters();
  std::optional<ProcessIteration> initial;
  for (std::size_t attempt = 0; attempt < kMaxInitialisationAttempts; ++attempt) {
    std::vector<double> rho(parameters.size());
    for (std::size_t k = 0; k < parameters.size(); ++k) {
      rho[k] = rng.uniform(parameters[k].domain.min(), parameters[k].domain.max());
    }
    auto candidate = make_iteration(space, 0, std::move(rho), process.q_opt, config, rng);
    if (candidate.score > config.threshold) {
      initial = std::move(candidate);
      break;
    }
  }
  if (!initial) {
    throw InitialisationError(
        "no defective initial parametrisation found; threshold too large");
  }
  process.iterations.push_back(std::move(*initial));

  std::optional<ExplorationState> exploration;
  if (behaviour == Behaviour::explorative) {
    exploration = initial_exploration_state(space, rng);
  }
  while (process.iterations.back().score > config.threshold &&
         process.iterations.size() < config.max_iterations) {
    const auto& previous = process.iterations.back();
    std::vector<double> rho;
    if (behaviour == Behaviour::exploitative) {
      rho = exploit_step(space, previous, process.q_opt, config.threshold);
    } else {
      auto [next_rho, next_state] = explore_step(space, previous, *exploration, rng);
      rho = std::move(next_rho);
      exploration = next_state;
    }
    process.iterations.push_back(make_iteration(
        space, process.iterations.size(), std::move(rho), process.q_opt, config, rng));
  }
  process.converged = process.iterations.back().score <= config.threshold;
  return process;
}

std::vector<ParametrisationProcess> generate_processes(
    const PQSpace& space, const GeneratorConfig& config, SeededRandom& rng) {
  std::vector<ParametrisationProcess> processes;
  std::size_t total = 0;
  while (total < config.total_iterations) {
    const auto behaviour = rng.bernoulli(config.exploitative_share)
                               ? Behaviour::exploitative
                               : Behaviour::explorative;
    processes.push_back(
        run_parametrisation_process(space, behaviour, config, rng, processes.size()));
    total += processes.back().iterations.size();
  }
  return processes;
}

}  // namespace pdpk
