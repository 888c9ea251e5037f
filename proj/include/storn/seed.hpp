#pragma once

#include <cstdint>
#include <string_view>

namespace storn {

/// One round of the splitmix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Named sub-seed: splitmix64(global ^ fnv1a64(name)).
constexpr std::uint64_t derive_seed(std::uint64_t global, std::string_view name) noexcept {
  return splitmix64(global ^ fnv1a64(name));
}

/// Seed of counter-based stream `index` under `base`.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(base) + index);
}

}  // namespace storn
