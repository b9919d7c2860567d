#pragma once

#include <cstdint>
#include <initializer_list>

namespace projgraph {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream. The i-th output is mix64(key + (i+1)*gamma),
/// so a stream is fully determined by its key and position. Child streams are
/// derived by hashing the parent key with a stream id; no state is shared.
class RandomStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit RandomStream(std::uint64_t key) : key_(key) {}

  /// Stream for (seed, id_0, id_1, ...). Order of ids matters.
  static RandomStream derive(std::uint64_t seed,
                             std::initializer_list<std::uint64_t> ids) {
    std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t id : ids) k = mix64(k ^ mix64(id + kGamma));
    return RandomStream(k);
  }

  RandomStream split(std::uint64_t id) const { return derive(key_, {id}); }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGamma); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection (bound > 0).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= limit) return r % bound;
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace projgraph
