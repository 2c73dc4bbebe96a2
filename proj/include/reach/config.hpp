#pragma once

#include <cstdint>
#include <string>

namespace reach {

inline constexpr int kMinPrecision = 4;
inline constexpr int kMaxPrecision = 18;
inline constexpr std::uint32_t kBinAlignment = 16;

// Identity shared by every sketch that may be combined with another.
struct HashConfig {
  std::uint64_t global_seed = 0;
  int precision = 14;         // HLL registers = 2^precision
  std::uint32_t bins = 4096;  // MinHash signature length

  // Throws ConfigError unless 4 <= precision <= 18 and bins is a positive
  // multiple of 16.
  void validate() const;

  [[nodiscard]] std::uint32_t registers() const noexcept { return std::uint32_t{1} << precision; }
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const HashConfig&, const HashConfig&) = default;
};

// Throws IncompatibleSketchError when a != b.
void require_same_config(const HashConfig& a, const HashConfig& b);

}  // namespace reach
