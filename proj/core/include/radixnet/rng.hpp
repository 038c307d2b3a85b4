#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace radixnet {

// Derives an independent stream seed from a base seed and an index
// (SplitMix64 finalizer). Used to give each run in a multi-run experiment
// its own reproducible stream regardless of execution order.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index);

// Deterministic random source. mt19937_64's output sequence is pinned by the
// C++ standard, but the standard *distributions* are not, so the mappings from
// raw 64-bit draws to doubles / bounded ints / permutations are done by hand
// here. Same seed => same results on every platform and compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi). Uses the top 53 bits of one raw draw.
  double uniform(double lo, double hi);

  // Uniform integer in [0, n). Rejection sampling, no modulo bias. n >= 1.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// [0, 1, ..., n-1] shuffled with the given seed.
std::vector<int> random_permutation(int n, std::uint64_t seed);

}  // namespace radixnet
