#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pdpk/config.hpp"
#include "pdpk/errors.hpp"
#include "pdpk/pq_space.hpp"

using namespace pdpk;

TEST_CASE("value ranges reject empty intervals") {
  CHECK_THROWS_AS(ValueRange(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ValueRange(2.0, 1.0), DomainError);
  const ValueRange r(0.0, 10.0);
  CHECK(r.width() == 10.0);
  CHECK(r.clamp(12.0) == 10.0);
  CHECK(r.clamp(-1.0) == 0.0);
  CHECK(r.contains(10.0 + 1e-10));
  CHECK_FALSE(r.contains(10.1));
}

TEST_CASE("linear dependency examples") {
  const auto identity = DependencyFunction::linear({0, 10}, {0, 10}, true);
  CHECK(identity.forward(5) == doctest::Approx(5));
  CHECK(identity.inverse_derivative(3) == doctest::Approx(1));

  const auto doubling = DependencyFunction::linear({0, 5}, {0, 10}, true);
  CHECK(doubling.forward(3) == doctest::Approx(6));
  CHECK(doubling.inverse(6) == doctest::Approx(3));
  for (double q : {0.5, 3.0, 9.5}) CHECK(doubling.inverse_derivative(q) == doctest::Approx(0.5));
  CHECK_THROWS_AS(doubling.forward(5.5), DomainError);
  CHECK_THROWS_AS(doubling.inverse(-1.0), DomainError);
}

TEST_CASE("quadratic dependency with vertex at the domain edge") {
  // f(p) = p^2 on [0, 3] -> [0, 9]
  const auto square = DependencyFunction::quadratic({0, 3}, {0, 9}, 0.0, true);
  CHECK(square.forward(2) == doctest::Approx(4));
  CHECK(square.inverse(4) == doctest::Approx(2));
  CHECK(square.inverse_derivative(4) == doctest::Approx(0.25));
  CHECK_THROWS_AS(square.inverse_derivative(0.0), SingularityError);
  CHECK_THROWS_AS(DependencyFunction::quadratic({0, 3}, {0, 9}, 1.5, true), DomainError);
}

TEST_CASE("logarithmic dependency scaled onto its target") {
  // ln(p) on [1, e] already maps onto [0, 1].
  const auto log = DependencyFunction::logarithmic({1, std::numbers::e}, {0, 1}, 0.0, true);
  CHECK(log.forward(std::numbers::e) == doctest::Approx(1));
  CHECK(log.forward(1) == doctest::Approx(0).epsilon(1e-12));
  CHECK(log.forward(2) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(DependencyFunction::logarithmic({1, 2}, {0, 1}, 1.0, true), DomainError);
}

TEST_CASE("every kind maps endpoints onto endpoints and inverts") {
  SeededRandom rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const double lo = rng.uniform(-50, 50);
    const ValueRange source(lo, lo + rng.uniform(0.5, 100));
    const double qlo = rng.uniform(-5, 5);
    const ValueRange target(qlo, qlo + rng.uniform(0.5, 20));
    const bool increasing = rng.bernoulli(0.5);
    const double offset = rng.uniform(0.25, 1.0) * source.width();
    const std::vector<DependencyFunction> fs = {
        DependencyFunction::linear(source, target, increasing),
        DependencyFunction::quadratic(source, target,
                                      rng.bernoulli(0.5) ? source.min() - offset
                                                         : source.max() + offset,
                                      increasing),
        DependencyFunction::logarithmic(source, target, source.min() - offset, increasing)};
    for (const auto& f : fs) {
      const double at_min = f.forward(source.min());
      const double at_max = f.forward(source.max());
      CHECK(at_min == doctest::Approx(increasing ? target.min() : target.max()));
      CHECK(at_max == doctest::Approx(increasing ? target.max() : target.min()));
      double previous = at_min;
      for (int s = 1; s <= 20; ++s) {
        const double p = source.min() + source.width() * s / 20.0;
        const double value = f.forward(p);
        CHECK(target.contains(value));
        CHECK((increasing ? value > previous : value < previous));
        previous = value;
        CHECK(f.inverse(value) == doctest::Approx(p).epsilon(1e-9).scale(source.width()));
      }
      // Derivatives against central finite differences.
      const double p = source.min() + 0.37 * source.width();
      const double h = 1e-5 * source.width();
      const double fd = (f.forward(p + h) - f.forward(p - h)) / (2 * h);
      CHECK(f.derivative(p) == doctest::Approx(fd).epsilon(1e-5));
      const double q = target.min() + 0.41 * target.width();
      const double hq = 1e-5 * target.width();
      const double inverse_fd = (f.inverse(q + hq) - f.inverse(q - hq)) / (2 * hq);
      CHECK(f.inverse_derivative(q) == doctest::Approx(inverse_fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("benchmark space has the configured dependency counts") {
  const GeneratorConfig config;
  SeededRandom rng(config.seed);
  const auto space = build_pq_space(config, rng);
  CHECK(space.parameters().size() == 46);
  CHECK(space.qualities().size() == 16);
  CHECK(space.dependencies().size() == share_count(0.10, 46 * 16));
  CHECK(space.dependencies().size() == 74);
  CHECK(space.known().size() == share_count(0.75, 74));
  for (const auto& key : space.known()) CHECK(space.dependencies().contains(key));
  for (std::size_t k = 0; k < 46; ++k) {
    const auto fanout = space.affected_qualities(k).size();
    if (fanout > 0) {
      CHECK(fanout >= config.fanout_min);
      CHECK(fanout <= config.fanout_max);
    }
  }
  SeededRandom again(config.seed);
  const auto replay = build_pq_space(config, again);
  CHECK(replay.known() == space.known());
  CHECK(replay.dependencies().size() == space.dependencies().size());
}

TEST_CASE("degenerate and exhaustive space configurations") {
  GeneratorConfig none;
  none.pq_causal_share = 0.0;
  SeededRandom rng(1);
  const auto empty = build_pq_space(none, rng);
  CHECK(empty.dependencies().empty());
  CHECK(empty.known().empty());

  GeneratorConfig full;
  full.p_count = 2;
  full.q_count = 2;
  full.pq_causal_share = 1.0;
  full.fanout_min = 2;
  full.fanout_max = 2;
  full.q_opt_size_max = 2;
  const auto complete = build_pq_space(full, rng);
  CHECK(complete.dependencies().size() == 4);
  for (std::size_t k = 0; k < 2; ++k) CHECK(complete.affected_qualities(k).size() == 2);

  GeneratorConfig infeasible = full;
  infeasible.pq_causal_share = 0.75;  // 3 dependencies, each parameter takes 2 or none
  CHECK_THROWS_AS(build_pq_space(infeasible, rng), ConfigError);
}

TEST_CASE("configuration parsing") {
  const auto defaults = load_config("{}");
  CHECK(defaults.seed == 42);
  CHECK(defaults.p_count == 46);
  CHECK(defaults.q_count == 16);
  CHECK(defaults.pq_causal_share == 0.10);
  CHECK(defaults.pq_known_share == 0.75);

  const auto overridden = load_config(R"({"seed": 7, "total_iterations": 100})");
  CHECK(overridden.seed == 7);
  CHECK(overridden.total_iterations == 100);
  CHECK(overridden.p_count == 46);

  CHECK_THROWS_AS(load_config(R"({"pq_causal_share": 1.5})"), ConfigError);
  CHECK_THROWS_AS(load_config(R"({"no_such_key": 1})"), ConfigError);
  CHECK_THROWS_AS(load_config("{"), ConfigError);
  try {
    load_config(R"({"pq_causal_share": 1.5, "max_iterations": 0})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() == 2);
  }
  const auto round_trip = config_from_json(to_json(overridden));
  CHECK(to_json(round_trip) == to_json(overridden));
}
