#pragma once

#include <cstdint>
#include <limits>
#include <type_traits>

namespace sspm {

/// SplitMix64 finalizer (Steele, Lea, Flood). Used for seed derivation and
/// hash-constant generation so results reproduce across platforms.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent child seed for `domain` under a user seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t domain) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(domain + 0x632be59bd9b4e019ULL));
}

/// Seed-domain tags. Fixed values; changing them changes every seeded result.
namespace seed_domain {
inline constexpr std::uint64_t kInsertSide = 0x696e73;  // "ins"
inline constexpr std::uint64_t kDeleteSide = 0x64656c;  // "del"
inline constexpr std::uint64_t kGridRow = 0x726f77;     // "row"
inline constexpr std::uint64_t kGridSign = 0x7367;      // "sg"
inline constexpr std::uint64_t kWorkload = 0x776b6c;    // "wkl"
inline constexpr std::uint64_t kTrial = 0x74726c;       // "trl"
} // namespace seed_domain

/// Uniform draw from [0, bound) using the multiply-high reduction with
/// rejection (Lemire). Requires a full-range 64-bit generator.
template <class Rng>
std::uint64_t draw_below(Rng& rng, std::uint64_t bound) {
  static_assert(std::is_same_v<typename Rng::result_type, std::uint64_t>);
  static_assert(Rng::min() == 0 && Rng::max() == std::numeric_limits<std::uint64_t>::max());
  using u128 = unsigned __int128;
  u128 m = static_cast<u128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double draw_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace sspm
