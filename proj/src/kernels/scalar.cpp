// Scalar reference kernels. This file is compiled with auto-vectorization
// disabled so it stays a plain element-at-a-time baseline.

#include <bit>
#include <cstddef>
#include <cstdint>

#include "reach/hash.hpp"
#include "reach/kernels.hpp"

namespace reach::kernels::detail {
namespace {

constexpr std::uint32_t kSentinel = 0xFFFFFFFFu;

inline bool test_bit(const std::uint64_t* mask, std::size_t i) { return (mask[i / 64] >> (i % 64)) & 1U; }

void equal_mask(const std::uint32_t* a, const std::uint32_t* b, std::uint64_t* mask, std::size_t n) {
  const std::size_t words = mask_words(n);
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = 0;
    const std::size_t base = w * 64;
    const std::size_t end = base + 64 < n ? base + 64 : n;
    for (std::size_t i = base; i < end; ++i) {
      if (a[i] == b[i]) bits |= std::uint64_t{1} << (i - base);
    }
    mask[w] = bits;
  }
}

void min(const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] < b[i] ? a[i] : b[i];
}

std::size_t popcount(const std::uint64_t* mask, std::size_t words) {
  std::size_t total = 0;
  for (std::size_t w = 0; w < words; ++w) total += static_cast<std::size_t>(std::popcount(mask[w]));
  return total;
}

void max_u8(std::uint8_t* acc, const std::uint8_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (b[i] > acc[i]) acc[i] = b[i];
  }
}

void hash_bins(std::uint32_t* out, const std::uint64_t* seeds, std::uint64_t item, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = bin_hash(item, seeds[i]);
}

void hash_min_update(std::uint32_t* bins, const std::uint64_t* seeds, std::uint64_t item, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t v = bin_hash(item, seeds[i]);
    if (v < bins[i]) bins[i] = v;
  }
}

void lift(const std::uint32_t* bins, std::uint32_t* values, std::uint64_t* mask, std::size_t n) {
  const std::size_t words = mask_words(n);
  for (std::size_t w = 0; w < words; ++w) mask[w] = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bins[i] != kSentinel) {
      values[i] = bins[i];
      mask[i / 64] |= std::uint64_t{1} << (i % 64);
    } else {
      values[i] = 0;
    }
  }
}

void intersect_sig(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* operand, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool keep = test_bit(mask, i) && values[i] == operand[i] && operand[i] != kSentinel;
    if (!keep) {
      values[i] = 0;
      mask[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }
  }
}

void intersect_inter(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool keep = test_bit(mask, i) && test_bit(om, i) && values[i] == ov[i];
    if (!keep) {
      values[i] = 0;
      mask[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }
  }
}

void unite_inter(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool va = test_bit(mask, i);
    const bool vb = test_bit(om, i);
    if (va && vb) {
      values[i] = values[i] < ov[i] ? values[i] : ov[i];
    } else if (vb) {
      values[i] = ov[i];
      mask[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{
      .equal_mask = &equal_mask,
      .min = &min,
      .popcount = &popcount,
      .max_u8 = &max_u8,
      .hash_bins = &hash_bins,
      .hash_min_update = &hash_min_update,
      .lift = &lift,
      .intersect_sig = &intersect_sig,
      .intersect_inter = &intersect_inter,
      .unite_inter = &unite_inter,
      .lane_width = 1,
      .isa = "scalar",
  };
  return table;
}

}  // namespace reach::kernels::detail
