#include "pdpk/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pdpk {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view name,
                          std::uint64_t index) {
  return splitmix64(splitmix64(root ^ fnv1a(name)) + index);
}

SeededRandom::SeededRandom(std::uint64_t seed) : seed_(seed), engine_(seed) {}

SeededRandom SeededRandom::substream(std::string_view name) const {
  return SeededRandom(derive_seed(seed_, name));
}

SeededRandom SeededRandom::substream(std::string_view name,
                                     std::uint64_t index) const {
  return SeededRandom(derive_seed(seed_, name, index));
}

double SeededRandom::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRandom::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::size_t SeededRandom::uniform_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: empty range");
  const std::uint64_t bound = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return static_cast<std::size_t>(x % bound);
}

std::int64_t SeededRandom::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: hi < lo");
  const auto span = static_cast<std::size_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_index(span));
}

double SeededRandom::normal(double mean, double stddev) {
  // Box-Muller; u1 in (0, 1] keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> SeededRandom::sample_without_replacement(
    std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("sample size exceeds population");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + uniform_index(n - i)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace pdpk
