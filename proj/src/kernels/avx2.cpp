// AVX2 kernels: 8 u32 lanes per operation.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "reach/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define REACH_HAVE_AVX2_KERNELS 1
#endif

#ifdef REACH_HAVE_AVX2_KERNELS

#pragma GCC push_options
#pragma GCC target("avx2,popcnt")

namespace reach::kernels::detail {
namespace {

constexpr std::uint64_t kChunk = 0xFFULL;

inline unsigned read_bits(const std::uint64_t* mask, std::size_t i) {
  return static_cast<unsigned>((mask[i / 64] >> (i % 64)) & kChunk);
}

inline void write_bits(std::uint64_t* mask, std::size_t i, unsigned bits) {
  const unsigned shift = i % 64;
  std::uint64_t& word = mask[i / 64];
  word = (word & ~(kChunk << shift)) | (std::uint64_t{bits} << shift);
}

// 8 mask bits -> 8 all-ones/all-zero lanes.
inline __m256i expand_bits(unsigned bits) {
  const __m256i lane_bit = _mm256_setr_epi32(1, 2, 4, 8, 16, 32, 64, 128);
  const __m256i b = _mm256_set1_epi32(static_cast<int>(bits));
  return _mm256_cmpeq_epi32(_mm256_and_si256(b, lane_bit), lane_bit);
}

inline unsigned lane_bits(__m256i lanes) {
  return static_cast<unsigned>(_mm256_movemask_ps(_mm256_castsi256_ps(lanes)));
}

inline __m256i load(const std::uint32_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline __m256i load64(const std::uint64_t* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }
inline void store(std::uint32_t* p, __m256i v) { _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v); }

// Low 64 bits of a 64x64 product, per lane.
inline __m256i mullo64(__m256i a, __m256i b) {
  const __m256i lo = _mm256_mul_epu32(a, b);
  const __m256i cross1 = _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32));
  const __m256i cross2 = _mm256_mul_epu32(_mm256_srli_epi64(a, 32), b);
  return _mm256_add_epi64(lo, _mm256_slli_epi64(_mm256_add_epi64(cross1, cross2), 32));
}

inline __m256i fmix(__m256i k) {
  const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xff51afd7ed558ccdULL));
  const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0xc4ceb9fe1a85ec53ULL));
  k = _mm256_xor_si256(k, _mm256_srli_epi64(k, 33));
  k = mullo64(k, c1);
  k = _mm256_xor_si256(k, _mm256_srli_epi64(k, 33));
  k = mullo64(k, c2);
  k = _mm256_xor_si256(k, _mm256_srli_epi64(k, 33));
  return k;
}

// Low 32 bits of bin_hash for 8 consecutive seeds.
inline __m256i hash8(__m256i item, const std::uint64_t* seeds) {
  const __m256i even = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
  const __m256i x0 = fmix(_mm256_xor_si256(item, load64(seeds)));
  const __m256i x1 = fmix(_mm256_xor_si256(item, load64(seeds + 4)));
  const __m256i lo0 = _mm256_permutevar8x32_epi32(x0, even);
  const __m256i lo1 = _mm256_permutevar8x32_epi32(x1, even);
  return _mm256_permute2x128_si256(lo0, lo1, 0x20);
}

void equal_mask(const std::uint32_t* a, const std::uint32_t* b, std::uint64_t* mask, std::size_t n) {
  const std::size_t words = mask_words(n);
  for (std::size_t w = 0; w < words; ++w) mask[w] = 0;
  for (std::size_t i = 0; i < n; i += 8) {
    const unsigned m = lane_bits(_mm256_cmpeq_epi32(load(a + i), load(b + i)));
    mask[i / 64] |= std::uint64_t{m} << (i % 64);
  }
}

void min(const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; i += 8) store(out + i, _mm256_min_epu32(load(a + i), load(b + i)));
}

std::size_t popcount(const std::uint64_t* mask, std::size_t words) {
  std::size_t total = 0;
  for (std::size_t w = 0; w < words; ++w) total += static_cast<std::size_t>(_mm_popcnt_u64(mask[w]));
  return total;
}

void max_u8(std::uint8_t* acc, const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    auto* pa = reinterpret_cast<__m256i*>(acc + i);
    const auto* pb = reinterpret_cast<const __m256i*>(b + i);
    _mm256_storeu_si256(pa, _mm256_max_epu8(_mm256_loadu_si256(pa), _mm256_loadu_si256(pb)));
  }
  for (; i + 16 <= n; i += 16) {
    auto* pa = reinterpret_cast<__m128i*>(acc + i);
    const auto* pb = reinterpret_cast<const __m128i*>(b + i);
    _mm_storeu_si128(pa, _mm_max_epu8(_mm_loadu_si128(pa), _mm_loadu_si128(pb)));
  }
  for (; i < n; ++i) {
    if (b[i] > acc[i]) acc[i] = b[i];
  }
}

void hash_bins(std::uint32_t* out, const std::uint64_t* seeds, std::uint64_t item, std::size_t n) {
  const __m256i it = _mm256_set1_epi64x(static_cast<long long>(item));
  for (std::size_t i = 0; i < n; i += 8) store(out + i, hash8(it, seeds + i));
}

void hash_min_update(std::uint32_t* bins, const std::uint64_t* seeds, std::uint64_t item, std::size_t n) {
  const __m256i it = _mm256_set1_epi64x(static_cast<long long>(item));
  for (std::size_t i = 0; i < n; i += 8) store(bins + i, _mm256_min_epu32(hash8(it, seeds + i), load(bins + i)));
}

void lift(const std::uint32_t* bins, std::uint32_t* values, std::uint64_t* mask, std::size_t n) {
  const __m256i sentinel = _mm256_set1_epi32(-1);
  const std::size_t words = mask_words(n);
  for (std::size_t w = 0; w < words; ++w) mask[w] = 0;
  for (std::size_t i = 0; i < n; i += 8) {
    const __m256i b = load(bins + i);
    const __m256i empty = _mm256_cmpeq_epi32(b, sentinel);
    store(values + i, _mm256_andnot_si256(empty, b));
    mask[i / 64] |= std::uint64_t{~lane_bits(empty) & 0xFFU} << (i % 64);
  }
}

void intersect_sig(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* operand, std::size_t n) {
  const __m256i sentinel = _mm256_set1_epi32(-1);
  for (std::size_t i = 0; i < n; i += 8) {
    const __m256i v = load(values + i);
    const __m256i o = load(operand + i);
    __m256i keep = _mm256_and_si256(expand_bits(read_bits(mask, i)), _mm256_cmpeq_epi32(v, o));
    keep = _mm256_andnot_si256(_mm256_cmpeq_epi32(o, sentinel), keep);
    store(values + i, _mm256_and_si256(keep, v));
    write_bits(mask, i, lane_bits(keep));
  }
}

void intersect_inter(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; i += 8) {
    const __m256i v = load(values + i);
    const __m256i both = expand_bits(read_bits(mask, i) & read_bits(om, i));
    const __m256i keep = _mm256_and_si256(both, _mm256_cmpeq_epi32(v, load(ov + i)));
    store(values + i, _mm256_and_si256(keep, v));
    write_bits(mask, i, lane_bits(keep));
  }
}

void unite_inter(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; i += 8) {
    const unsigned ma = read_bits(mask, i);
    const unsigned mb = read_bits(om, i);
    const __m256i va = expand_bits(ma);
    const __m256i vb = expand_bits(mb);
    // Invalid bins become all-ones so they never win the minimum.
    const __m256i a = _mm256_or_si256(load(values + i), _mm256_xor_si256(va, _mm256_set1_epi32(-1)));
    const __m256i b = _mm256_or_si256(load(ov + i), _mm256_xor_si256(vb, _mm256_set1_epi32(-1)));
    const __m256i either = _mm256_or_si256(va, vb);
    store(values + i, _mm256_and_si256(either, _mm256_min_epu32(a, b)));
    write_bits(mask, i, ma | mb);
  }
}

}  // namespace

const KernelTable* avx2_table() noexcept {
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
      .lane_width = 8,
      .isa = "avx2",
  };
  return &table;
}

}  // namespace reach::kernels::detail

#pragma GCC pop_options

#else

namespace reach::kernels::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace reach::kernels::detail

#endif
