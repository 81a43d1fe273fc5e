#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace prime {

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combination; mix(a, b) != mix(b, a) in general.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

std::uint64_t hash_string(std::string_view s);

/// Portable generator. The std distributions are implementation-defined, so
/// bounded draws and shuffles are done here to keep outputs identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, n); n > 0.
  std::uint64_t uniform(std::uint64_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace prime
