#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace nwfe {

/// Reproducible random source: MT19937-64 for the bit stream, 53-bit
/// uniform doubles, and the basic Box-Muller transform for normals. All
/// three are fully specified, so draws match across compilers and
/// platforms (unlike std::normal_distribution and std::shuffle).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal; the second Box-Muller variate is cached.
  double normal();

  /// Uniform integer in [0, n), by rejection so there is no modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finaliser; derives independent sub-seeds from one user seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace nwfe
