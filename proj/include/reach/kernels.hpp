#pragma once

// Bin-wise primitives behind the sketch algebra. Every primitive has a scalar
// reference implementation and a lane-parallel one (AVX2 or AVX-512, picked at
// startup). Both paths are required to produce bit-identical output.
//
// Masks are arrays of 64-bit words; bit i lives in word i / 64 at position
// i % 64. Lengths passed to the bin-wise kernels must be multiples of 16.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reach::kernels {

enum class KernelPath : std::uint8_t { scalar_reference, lane_parallel };

struct KernelDispatch {
  KernelPath active_path = KernelPath::scalar_reference;
  std::size_t lane_width = 1;  // u32 values per lane operation
  std::string_view isa = "scalar";
};

[[nodiscard]] KernelDispatch current_dispatch() noexcept;
[[nodiscard]] bool lane_parallel_available() noexcept;

// Switches the process-wide path. Requesting lane_parallel on hardware without
// lane support silently keeps the scalar path. Returns the previous path.
KernelPath select_path(KernelPath path) noexcept;

[[nodiscard]] constexpr std::size_t mask_words(std::size_t bits) noexcept { return (bits + 63) / 64; }

// bit i of mask set iff a[i] == b[i].
void lanes_equal_mask(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::span<std::uint64_t> mask);
[[nodiscard]] std::vector<std::uint64_t> lanes_equal_mask(std::span<const std::uint32_t> a,
                                                          std::span<const std::uint32_t> b);

// out[i] = min(a[i], b[i]), unsigned.
void lanes_min(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::span<std::uint32_t> out);
[[nodiscard]] std::vector<std::uint32_t> lanes_min(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

[[nodiscard]] std::size_t mask_popcount(std::span<const std::uint64_t> mask) noexcept;

// acc[i] = min(acc[i], b[i])
void min_inplace(std::span<std::uint32_t> acc, std::span<const std::uint32_t> b);
// acc[i] = max(acc[i], b[i]); used for HLL registers (any length multiple of 16).
void max_inplace(std::span<std::uint8_t> acc, std::span<const std::uint8_t> b);

// out[i] = bin_hash(item, seeds[i])
void hash_bins(std::span<std::uint32_t> out, std::span<const std::uint64_t> seeds, std::uint64_t item);
// bins[i] = min(bins[i], bin_hash(item, seeds[i]))
void hash_min_update(std::span<std::uint32_t> bins, std::span<const std::uint64_t> seeds, std::uint64_t item);

// Intermediate-signature steps. (values, mask) is the accumulator; invalid
// bins always end with value 0.
void lift_signature(std::span<const std::uint32_t> bins, std::span<std::uint32_t> values,
                    std::span<std::uint64_t> mask);
void intersect_signature(std::span<std::uint32_t> values, std::span<std::uint64_t> mask,
                         std::span<const std::uint32_t> operand);
void intersect_intermediate(std::span<std::uint32_t> values, std::span<std::uint64_t> mask,
                            std::span<const std::uint32_t> other_values, std::span<const std::uint64_t> other_mask);
void unite_intermediate(std::span<std::uint32_t> values, std::span<std::uint64_t> mask,
                        std::span<const std::uint32_t> other_values, std::span<const std::uint64_t> other_mask);

struct BenchmarkReport {
  std::size_t k = 0;
  std::size_t iterations = 0;
  double scalar_ns = 0.0;  // total wall-clock over all iterations
  double vector_ns = 0.0;
  double speedup = 0.0;    // scalar_ns / vector_ns
  bool outputs_identical = false;
  std::string isa;

  [[nodiscard]] std::string to_json() const;
};

// Times equality-mask + minimum + popcount over the same random inputs on
// both paths. k must be a multiple of 16.
[[nodiscard]] BenchmarkReport benchmark_kernels(std::size_t k, std::size_t iterations, std::uint64_t seed = 1);

namespace detail {

// Raw-pointer kernel table; n is always a multiple of 16.
struct KernelTable {
  void (*equal_mask)(const std::uint32_t* a, const std::uint32_t* b, std::uint64_t* mask, std::size_t n);
  void (*min)(const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* out, std::size_t n);
  std::size_t (*popcount)(const std::uint64_t* mask, std::size_t words);
  void (*max_u8)(std::uint8_t* acc, const std::uint8_t* b, std::size_t n);
  void (*hash_bins)(std::uint32_t* out, const std::uint64_t* seeds, std::uint64_t item, std::size_t n);
  void (*hash_min_update)(std::uint32_t* bins, const std::uint64_t* seeds, std::uint64_t item, std::size_t n);
  void (*lift)(const std::uint32_t* bins, std::uint32_t* values, std::uint64_t* mask, std::size_t n);
  void (*intersect_sig)(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* operand, std::size_t n);
  void (*intersect_inter)(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                          std::size_t n);
  void (*unite_inter)(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                      std::size_t n);
  std::size_t lane_width;
  std::string_view isa;
};

const KernelTable& scalar_table() noexcept;
// nullptr when the CPU has no supported lane extension.
const KernelTable* lane_table() noexcept;
const KernelTable& active_table() noexcept;

const KernelTable* avx2_table() noexcept;
const KernelTable* avx512_table() noexcept;

}  // namespace detail
}  // namespace reach::kernels
