#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace fluency {

// Seedable generator with a fully specified output stream: the raw
// std::mt19937_64 engine (whose sequence is fixed by the C++ standard) plus
// bounded draws by rejection sampling and 53-bit uniform doubles. The
// standard library distributions are avoided because their algorithms are
// implementation-defined.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+rejection";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin(double p_true) { return uniform() < p_true; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent-looking seed from a base seed and a stream tag.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace fluency
