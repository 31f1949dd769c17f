#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace pdpk {

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard; all distributions are implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined. This
// keeps every generated byte identical across standard libraries.
class SeededRandom {
 public:
  explicit SeededRandom(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  // Independent stream derived from this generator's seed and a name, so
  // adding a new consumer never perturbs the draws of existing ones.
  SeededRandom substream(std::string_view name) const;
  SeededRandom substream(std::string_view name, std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  // Uniform in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  // Uniform in [lo, hi], both inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool bernoulli(double p) { return uniform() < p; }
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t root, std::string_view name,
                          std::uint64_t index = 0);

}  // namespace pdpk
