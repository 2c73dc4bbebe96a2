#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "reach/config.hpp"

namespace reach {

// HyperLogLog with one byte per register. Merge is per-register maximum,
// which makes the merged sketch the sketch of the set union.
class HllSketch {
 public:
  // Register index and rank an item lands on.
  struct Slot {
    std::uint32_t index;
    std::uint8_t rank;
  };

  explicit HllSketch(const HashConfig& config);

  // Adopts raw registers; throws FormatError when a register exceeds
  // 64 - p + 1 or the count is not 2^p.
  static HllSketch from_registers(const HashConfig& config, std::vector<std::uint8_t> registers);

  [[nodiscard]] static Slot locate(std::uint64_t item, const HashConfig& config) noexcept;
  [[nodiscard]] static std::uint8_t max_rank(int precision) noexcept {
    return static_cast<std::uint8_t>(64 - precision + 1);
  }

  void insert(std::uint64_t item) noexcept { raise(locate(item, config_)); }
  void raise(Slot slot) noexcept {
    auto& r = registers_[slot.index];
    if (slot.rank > r) r = slot.rank;
  }

  void merge(const HllSketch& other);

  // Harmonic-mean estimate with linear counting below 2.5 m when empty
  // registers remain. No large-range correction: the hash space is 64 bits.
  [[nodiscard]] double estimate() const noexcept;

  [[nodiscard]] const HashConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::span<const std::uint8_t> registers() const noexcept { return registers_; }
  [[nodiscard]] std::span<std::uint8_t> mutable_registers() noexcept { return registers_; }
  [[nodiscard]] bool empty() const noexcept;

  friend bool operator==(const HllSketch&, const HllSketch&) = default;

 private:
  HashConfig config_;
  std::vector<std::uint8_t> registers_;
};

[[nodiscard]] HllSketch hll_merge(const HllSketch& a, const HllSketch& b);

}  // namespace reach
