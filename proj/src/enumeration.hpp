#pragma once

// Index-level statistics for enumerated small graphs (n <= 11). Works on the
// dyad bit vector directly instead of materializing Graph objects.

#include <array>
#include <bit>
#include <cstdint>

#include "projgraph/graph.hpp"

namespace projgraph::detail {

struct DyadPairs {
  std::array<std::uint8_t, 64> lo{};
  std::array<std::uint8_t, 64> hi{};
  constexpr DyadPairs() {
    int k = 0;
    for (int j = 1; j <= static_cast<int>(kMaxIndexableNodes) && k < 64; ++j)
      for (int i = 0; i < j && k < 64; ++i, ++k) {
        lo[k] = static_cast<std::uint8_t>(i);
        hi[k] = static_cast<std::uint8_t>(j);
      }
  }
};

inline constexpr DyadPairs kDyadPairs{};

inline std::uint32_t index_edges(std::uint64_t k) {
  return static_cast<std::uint32_t>(std::popcount(k));
}

inline std::uint32_t index_triangles(std::uint64_t k) {
  std::array<std::uint16_t, kMaxIndexableNodes> adj{};
  for (std::uint64_t bits = k; bits; bits &= bits - 1) {
    const int b = std::countr_zero(bits);
    adj[kDyadPairs.lo[b]] |= static_cast<std::uint16_t>(1u << kDyadPairs.hi[b]);
    adj[kDyadPairs.hi[b]] |= static_cast<std::uint16_t>(1u << kDyadPairs.lo[b]);
  }
  std::uint32_t t = 0;
  for (std::uint64_t bits = k; bits; bits &= bits - 1) {
    const int b = std::countr_zero(bits);
    const unsigned j = kDyadPairs.hi[b];
    const unsigned above = ~((2u << j) - 1u);
    t += static_cast<std::uint32_t>(
        std::popcount(static_cast<unsigned>(adj[kDyadPairs.lo[b]] & adj[j]) & above));
  }
  return t;
}

}  // namespace projgraph::detail
