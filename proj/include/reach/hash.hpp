#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace reach {

// 64-bit FNV-1a over the raw PSID bytes. This is the "device hash" every
// sketch consumes.
[[nodiscard]] constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// 64-bit avalanche finalizer (murmur3 fmix64).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t k) noexcept {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

// Seed for MinHash bin i.
[[nodiscard]] constexpr std::uint64_t bin_seed(std::uint64_t global_seed, std::uint32_t bin) noexcept {
  return mix64(global_seed + bin);
}

// Value of an item in the bin whose seed is `seed`.
[[nodiscard]] constexpr std::uint32_t bin_hash(std::uint64_t item, std::uint64_t seed) noexcept {
  return static_cast<std::uint32_t>(mix64(item ^ seed));
}

// HLL domain separation: the HLL hash must not coincide with any MinHash bin
// hash, so its seed is derived from a distinct constant.
inline constexpr std::uint64_t kHllDomainTag = 0x9e3779b97f4a7c15ULL;

[[nodiscard]] constexpr std::uint64_t hll_hash(std::uint64_t item, std::uint64_t global_seed) noexcept {
  return mix64(item ^ mix64(global_seed ^ kHllDomainTag));
}

// Shared, immutable table of per-bin seeds for (global_seed, k). Tables are
// cached process-wide; the returned pointer is safe to share across threads.
using SeedTable = std::vector<std::uint64_t>;
[[nodiscard]] std::shared_ptr<const SeedTable> seed_table(std::uint64_t global_seed, std::uint32_t bins);

}  // namespace reach
