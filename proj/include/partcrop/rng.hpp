#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace partcrop {

// Portable random streams.
//
// Every stochastic step in the toolkit draws from xoshiro256** seeded through
// SplitMix64, and derives sub-streams with derive_seed(). Uniform doubles use
// the top 53 bits; normals use the Box-Muller cosine branch (one normal per
// two uniforms, no cached state). Integer ranges use rejection sampling. None
// of this depends on <random>, so sequences are identical across standard
// libraries and can be reproduced from the seed in other languages.

/// SplitMix64 output function applied to `x + golden gamma`.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for an independent stream identified by `key` under `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept;

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  std::uint64_t next_u64() noexcept;
  std::uint64_t operator()() noexcept { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on the closed range [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;
  double normal() noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Fisher-Yates, drawing j uniformly from [0, i].
  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> s_;
};

}  // namespace partcrop
