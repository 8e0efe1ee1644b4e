#pragma once

// Portable randomness. std::mt19937_64 is bit-exact across standard
// libraries, but the std distributions and std::shuffle are not, so bounded
// draws and shuffles are done here by hand.

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace sstune {

using Rng = std::mt19937_64;

/// FNV-1a, 64-bit. Stable across platforms and runs.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ mix64(v));
}

/// Independent random streams per paragraph. The stream tag separates
/// draws made at different pipeline stages for the same paragraph.
enum class RngStream : std::uint64_t { split = 1, negatives = 2 };

inline std::uint64_t paragraph_seed(std::uint64_t seed, std::string_view article_id,
                                    std::size_t paragraph_index, RngStream stream) {
  std::uint64_t h = hash_combine(mix64(seed), fnv1a64(article_id));
  h = hash_combine(h, static_cast<std::uint64_t>(paragraph_index));
  return hash_combine(h, static_cast<std::uint64_t>(stream));
}

inline Rng paragraph_rng(std::uint64_t seed, std::string_view article_id,
                         std::size_t paragraph_index, RngStream stream) {
  return Rng(paragraph_seed(seed, article_id, paragraph_index, stream));
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - kMax % n;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Uniform integer in [lo, hi].
inline std::uint64_t uniform_between(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_below(rng, hi - lo + 1);
}

/// Uniform real in [0, 1) with 53 bits of precision.
inline double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Fisher-Yates, descending.
template <typename T>
void shuffle_in_place(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace sstune
