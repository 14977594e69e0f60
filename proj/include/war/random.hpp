#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace war {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Stable across platforms, unlike std::hash.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes of `s`.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Folds a list of labels into a seed derived from `master`.
/// derive_seed(m, {"war", "boston", "3"}) is stable for a given input.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::string_view> parts) {
  std::uint64_t h = mix64(master);
  for (auto part : parts) {
    h = mix64(h ^ fnv1a(part));
  }
  return h;
}

}  // namespace war
