#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lensless {

// SplitMix64 finalizer. Used for seed derivation and hashing.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All transforms on top of it (uniform reals, bounded integers,
/// normals) are implemented here rather than through <random> distributions,
/// whose algorithms differ between standard library vendors. Integer and
/// uniform draws are therefore bit-identical on every platform; normal draws
/// additionally rely on std::log being correctly rounded.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}; unbiased (rejection sampling). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Independent child stream identified by `salt`. Does not advance *this.
  RandomStream derive(std::uint64_t salt) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lensless
