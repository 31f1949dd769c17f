#include <cmath>

#include "doctest.h"
#include "pdpk/errors.hpp"
#include "pdpk/process_sim.hpp"

using namespace pdpk;

namespace {

struct Dep {
  std::size_t k, j;
  DependencyFunction f;
  bool known = true;
};

PQSpace make_space(std::vector<ValueRange> params, std::vector<ValueRange> qualities,
                   std::vector<Dep> deps) {
  std::vector<Parameter> ps;
  for (std::size_t k = 0; k < params.size(); ++k) ps.push_back({k, "p_" + std::to_string(k), params[k]});
  std::vector<Quality> qs;
  for (std::size_t j = 0; j < qualities.size(); ++j) {
    qs.push_back({j, "q_" + std::to_string(j), qualities[j]});
  }
  std::map<PairKey, DependencyFunction> map;
  std::set<PairKey> known;
  for (const auto& d : deps) {
    map.emplace(PairKey{d.k, d.j}, d.f);
    if (d.known) known.insert({d.k, d.j});
  }
  return PQSpace(ps, qs, map, known);
}

ProcessIteration iteration_at(const PQSpace& space, std::vector<double> rho,
                              std::vector<std::size_t> q_opt) {
  ProcessIteration it;
  it.qualities = compute_quality(space, rho);
  it.parametrisation = std::move(rho);
  it.score = score(it.qualities, q_opt, space);
  return it;
}

}  // namespace

TEST_CASE("quality is the mean of the affecting dependencies") {
  const auto identity = DependencyFunction::linear({0, 10}, {0, 10}, true);
  const auto single = make_space({{0, 10}}, {{0, 10}}, {{0, 0, identity}});
  CHECK(compute_quality(single, std::vector<double>{5})[0] == doctest::Approx(5));

  const auto f1 = DependencyFunction::linear({0, 20}, {0, 20}, true);  // p
  const auto f2 = DependencyFunction::linear({0, 10}, {0, 20}, true);  // 2p
  const auto pair = make_space({{0, 20}, {0, 10}}, {{0, 20}, {0, 5}}, {{0, 0, f1}, {1, 0, f2}});
  const auto o = compute_quality(pair, std::vector<double>{2, 3});
  CHECK(o[0] == doctest::Approx(4));
  CHECK(o[1] == 0.0);  // unaffected quality sits at its optimum
}

TEST_CASE("noise is the identity at zero and clamps") {
  const auto f = DependencyFunction::linear({0, 10}, {0, 10}, true);
  const auto space = make_space({{0, 10}}, {{0, 10}}, {{0, 0, f}});
  SeededRandom rng(1);
  const std::vector<double> o{3.0};
  CHECK(apply_noise(space, o, 0.0, rng) == o);

  double sum = 0, sum2 = 0;
  constexpr int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double v = apply_noise(space, std::vector<double>{5.0}, 0.05, rng)[0];
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  CHECK(std::sqrt(sum2 / n - mean * mean) == doctest::Approx(0.5).epsilon(0.05));

  for (int i = 0; i < 100; ++i) {
    CHECK(apply_noise(space, std::vector<double>{10.0}, 2.0, rng)[0] <= 10.0);
  }
}

TEST_CASE("score examples") {
  const auto f = DependencyFunction::linear({0, 10}, {0, 10}, true);
  const auto space = make_space({{0, 10}}, {{0, 10}, {0, 10}}, {{0, 0, f}, {0, 1, f}});
  const std::vector<std::size_t> both{0, 1};
  CHECK(score(std::vector<double>{0, 0}, both, space) == 0.0);
  CHECK(score(std::vector<double>{10, 10}, both, space) == 1.0);
  CHECK(score(std::vector<double>{2, 8}, both, space) == doctest::Approx(0.5));
  CHECK_THROWS_AS(score(std::vector<double>{2, 8}, std::vector<std::size_t>{}, space),
                  EmptyTargetError);
}

TEST_CASE("exploitative step follows the inverse slope") {
  const auto doubling = DependencyFunction::linear({0, 5}, {0, 10}, true);
  const auto space = make_space({{0, 5}, {0, 5}}, {{0, 10}},
                                {{0, 0, doubling}, {1, 0, doubling, false}});
  const std::vector<std::size_t> q_opt{0};
  ProcessIteration prev;
  prev.parametrisation = {4.0, 4.0};
  prev.qualities = {6.0};
  const auto next = exploit_step(space, prev, q_opt, 0.1);
  CHECK(next[0] == doctest::Approx(4.0 - 0.5));
  CHECK(next[1] == 4.0);  // unknown dependency, not adjustable by the expert

  prev.qualities = {0.5};  // within threshold
  CHECK(exploit_step(space, prev, q_opt, 0.1) == prev.parametrisation);
}

TEST_CASE("exploitative step against an independent oracle") {
  // Random known dependencies; the oracle recomputes the update from the
  // analytic inverse of each function.
  SeededRandom rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Dep> deps;
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t j = 0; j < 2; ++j) {
        if (!rng.bernoulli(0.7)) continue;
        deps.push_back({k, j, DependencyFunction::linear({0, 100}, {0, 10}, rng.bernoulli(0.5)),
                        rng.bernoulli(0.8)});
      }
    }
    if (deps.empty()) continue;
    const auto space = make_space({{0, 100}, {0, 100}, {0, 100}}, {{0, 10}, {0, 10}}, deps);
    const std::vector<std::size_t> q_opt{0, 1};
    const auto prev = iteration_at(space, {rng.uniform(0, 100), rng.uniform(0, 100),
                                           rng.uniform(0, 100)}, q_opt);
    const double t = 0.2;
    const auto next = exploit_step(space, prev, q_opt, t);
    for (std::size_t k = 0; k < 3; ++k) {
      double delta = 0.0;
      int count = 0;
      for (const auto& d : deps) {
        if (d.k != k || !d.known) continue;
        ++count;
        const double o = prev.qualities[d.j];
        if (o / 10.0 <= t) continue;
        // linear f(p) = a p + b with a = +-0.1
        delta += 1.0 / (d.f.increasing() ? 0.1 : -0.1);
      }
      const double expected =
          count == 0 ? prev.parametrisation[k]
                     : std::clamp(prev.parametrisation[k] - delta / count, 0.0, 100.0);
      CHECK(next[k] == doctest::Approx(expected));
    }
  }
}

TEST_CASE("explorative state machine") {
  const auto f = DependencyFunction::linear({0, 100}, {0, 10}, true);
  const auto space = make_space({{0, 100}, {0, 100}}, {{0, 10}}, {{0, 0, f}, {1, 0, f}});
  const std::vector<std::size_t> q_opt{0};
  SeededRandom rng(2);

  ExplorationState state{0, +1, std::nullopt};
  auto prev = iteration_at(space, {50, 50}, q_opt);
  auto [rho, next] = explore_step(space, prev, state, rng);
  CHECK(rho[0] == doctest::Approx(60));  // +0.1 * 100
  CHECK(rho[1] == 50);
  CHECK(next.active_parameter == 0);
  CHECK(next.last_score == prev.score);

  // Worse score -> reverse direction.
  auto worse = iteration_at(space, rho, q_opt);
  auto [rho2, s2] = explore_step(space, worse, next, rng);
  CHECK(s2.direction == -1);
  CHECK(s2.active_parameter == 0);
  CHECK(rho2[0] == doctest::Approx(50));

  // Better score -> keep going the same way.
  auto better = iteration_at(space, rho2, q_opt);
  auto [rho3, s3] = explore_step(space, better, s2, rng);
  CHECK(s3.direction == -1);
  CHECK(s3.active_parameter == 0);
  CHECK(rho3[0] == doctest::Approx(40));

  // Clamped at the maximum with unchanged score -> next parameter.
  ExplorationState at_max{0, +1, std::nullopt};
  auto top = iteration_at(space, {100, 50}, q_opt);
  auto [r4, s4] = explore_step(space, top, at_max, rng);
  CHECK(r4[0] == 100);
  auto unchanged = iteration_at(space, r4, q_opt);
  auto [r5, s5] = explore_step(space, unchanged, s4, rng);
  CHECK(s5.active_parameter == 1);
  CHECK(r5[0] == 100);
  CHECK(std::abs(r5[1] - 50) == doctest::Approx(10));
}

TEST_CASE("exploitative episodes converge on fully known linear spaces") {
  int converged = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SeededRandom rng(seed);
    std::vector<Dep> deps;
    for (std::size_t k = 0; k < 4; ++k) {
      deps.push_back({k, k % 2, DependencyFunction::linear({0, 100}, {0, 10}, rng.bernoulli(0.5))});
    }
    const auto space = make_space({{0, 100}, {0, 100}, {0, 100}, {0, 100}}, {{0, 10}, {0, 10}}, deps);
    GeneratorConfig config;
    config.threshold = 0.05;
    config.q_opt_size_min = 1;
    config.q_opt_size_max = 2;
    const auto process = run_parametrisation_process(space, Behaviour::exploitative, config, rng);
    CHECK(process.iterations.size() <= config.max_iterations);
    converged += process.converged;
  }
  CHECK(converged >= 95);
}

TEST_CASE("episode invariants and errors") {
  const auto f = DependencyFunction::linear({0, 100}, {0, 10}, true);
  const auto space = make_space({{0, 100}, {0, 100}}, {{0, 10}, {0, 10}}, {{0, 0, f}, {1, 1, f}});
  GeneratorConfig config;
  SeededRandom rng(4);
  for (auto behaviour : {Behaviour::exploitative, Behaviour::explorative}) {
    for (int i = 0; i < 20; ++i) {
      const auto p = run_parametrisation_process(space, behaviour, config, rng, i);
      CHECK(p.id == static_cast<std::size_t>(i));
      CHECK(!p.q_opt.empty());
      CHECK(p.iterations.front().score > config.threshold);
      CHECK(p.iterations.size() >= 1);
      CHECK(p.iterations.size() <= config.max_iterations);
      CHECK(p.converged == (p.iterations.back().score <= config.threshold));
      for (std::size_t n = 0; n < p.iterations.size(); ++n) {
        const auto& it = p.iterations[n];
        CHECK(it.index == n);
        CHECK(it.score >= 0.0);
        CHECK(it.score <= 1.0);
        for (double v : it.parametrisation) CHECK((v >= 0.0 && v <= 100.0));
      }
    }
  }
  config.threshold = 1.0;
  CHECK_THROWS_AS(run_parametrisation_process(space, Behaviour::exploitative, config, rng),
                  InitialisationError);
}

TEST_CASE("process generation fills the iteration budget") {
  const auto f = DependencyFunction::linear({0, 100}, {0, 10}, true);
  const auto space = make_space({{0, 100}, {0, 100}}, {{0, 10}, {0, 10}}, {{0, 0, f}, {1, 1, f}});
  GeneratorConfig config;
  SeededRandom rng(8);
  const auto processes = generate_processes(space, config, rng);
  std::size_t total = 0;
  for (std::size_t i = 0; i < processes.size(); ++i) {
    CHECK(processes[i].id == i);
    total += processes[i].iterations.size();
  }
  CHECK(total >= config.total_iterations);
  CHECK(total < config.total_iterations + config.max_iterations);

  config.total_iterations = 15;
  config.max_iterations = 15;
  config.threshold = 0.0001;
  SeededRandom one(8);
  config.exploitative_share = 0.0;
  const auto few = generate_processes(space, config, one);
  std::size_t few_total = 0;
  for (const auto& p : few) few_total += p.iterations.size();
  CHECK(few_total >= 15);
  CHECK(few_total - few.back().iterations.size() < 15);
  if (few.front().iterations.size() == 15) CHECK(few.size() == 1);

  config.exploitative_share = 1.0;
  config.total_iterations = 200;
  config.threshold = 0.15;
  SeededRandom all(3);
  for (const auto& p : generate_processes(space, config, all)) {
    CHECK(p.behaviour == Behaviour::exploitative);
  }
}
