// AVX-512 kernels: 16 u32 lanes per operation.

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

#include "reach/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define REACH_HAVE_AVX512_KERNELS 1
#endif

#ifdef REACH_HAVE_AVX512_KERNELS

#pragma GCC push_options
#pragma GCC target("avx512f,avx512bw,avx512dq,avx512vl,popcnt")

namespace reach::kernels::detail {
namespace {

constexpr std::uint64_t kChunk = 0xFFFFULL;

inline std::uint16_t read_bits(const std::uint64_t* mask, std::size_t i) {
  return static_cast<std::uint16_t>((mask[i / 64] >> (i % 64)) & kChunk);
}

inline void write_bits(std::uint64_t* mask, std::size_t i, std::uint16_t bits) {
  const unsigned shift = i % 64;
  std::uint64_t& word = mask[i / 64];
  word = (word & ~(kChunk << shift)) | (std::uint64_t{bits} << shift);
}

inline __m512i fmix(__m512i k) {
  const __m512i c1 = _mm512_set1_epi64(static_cast<long long>(0xff51afd7ed558ccdULL));
  const __m512i c2 = _mm512_set1_epi64(static_cast<long long>(0xc4ceb9fe1a85ec53ULL));
  k = _mm512_xor_si512(k, _mm512_srli_epi64(k, 33));
  k = _mm512_mullo_epi64(k, c1);
  k = _mm512_xor_si512(k, _mm512_srli_epi64(k, 33));
  k = _mm512_mullo_epi64(k, c2);
  k = _mm512_xor_si512(k, _mm512_srli_epi64(k, 33));
  return k;
}

// Low 32 bits of bin_hash for 16 consecutive seeds.
inline __m512i hash16(__m512i item, const std::uint64_t* seeds) {
  const __m512i x0 = fmix(_mm512_xor_si512(item, _mm512_loadu_si512(seeds)));
  const __m512i x1 = fmix(_mm512_xor_si512(item, _mm512_loadu_si512(seeds + 8)));
  const __m256i lo0 = _mm512_cvtepi64_epi32(x0);
  const __m256i lo1 = _mm512_cvtepi64_epi32(x1);
  return _mm512_inserti64x4(_mm512_castsi256_si512(lo0), lo1, 1);
}

void equal_mask(const std::uint32_t* a, const std::uint32_t* b, std::uint64_t* mask, std::size_t n) {
  const std::size_t words = mask_words(n);
  for (std::size_t w = 0; w < words; ++w) mask[w] = 0;
  for (std::size_t i = 0; i < n; i += 16) {
    const __mmask16 m = _mm512_cmpeq_epu32_mask(_mm512_loadu_si512(a + i), _mm512_loadu_si512(b + i));
    mask[i / 64] |= std::uint64_t{m} << (i % 64);
  }
}

void min(const std::uint32_t* a, const std::uint32_t* b, std::uint32_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; i += 16) {
    _mm512_storeu_si512(out + i, _mm512_min_epu32(_mm512_loadu_si512(a + i), _mm512_loadu_si512(b + i)));
  }
}

std::size_t popcount(const std::uint64_t* mask, std::size_t words) {
  std::size_t total = 0;
  for (std::size_t w = 0; w < words; ++w) total += static_cast<std::size_t>(_mm_popcnt_u64(mask[w]));
  return total;
}

void max_u8(std::uint8_t* acc, const std::uint8_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 64 <= n; i += 64) {
    _mm512_storeu_si512(acc + i, _mm512_max_epu8(_mm512_loadu_si512(acc + i), _mm512_loadu_si512(b + i)));
  }
  if (i < n) {
    const __mmask64 tail = (n - i) >= 64 ? ~__mmask64{0} : ((__mmask64{1} << (n - i)) - 1);
    const __m512i x = _mm512_maskz_loadu_epi8(tail, acc + i);
    const __m512i y = _mm512_maskz_loadu_epi8(tail, b + i);
    _mm512_mask_storeu_epi8(acc + i, tail, _mm512_max_epu8(x, y));
  }
}

void hash_bins(std::uint32_t* out, const std::uint64_t* seeds, std::uint64_t item, std::size_t n) {
  const __m512i it = _mm512_set1_epi64(static_cast<long long>(item));
  for (std::size_t i = 0; i < n; i += 16) _mm512_storeu_si512(out + i, hash16(it, seeds + i));
}

void hash_min_update(std::uint32_t* bins, const std::uint64_t* seeds, std::uint64_t item, std::size_t n) {
  const __m512i it = _mm512_set1_epi64(static_cast<long long>(item));
  for (std::size_t i = 0; i < n; i += 16) {
    const __m512i v = hash16(it, seeds + i);
    _mm512_storeu_si512(bins + i, _mm512_min_epu32(v, _mm512_loadu_si512(bins + i)));
  }
}

void lift(const std::uint32_t* bins, std::uint32_t* values, std::uint64_t* mask, std::size_t n) {
  const __m512i sentinel = _mm512_set1_epi32(-1);
  const std::size_t words = mask_words(n);
  for (std::size_t w = 0; w < words; ++w) mask[w] = 0;
  for (std::size_t i = 0; i < n; i += 16) {
    const __m512i b = _mm512_loadu_si512(bins + i);
    const __mmask16 m = _mm512_cmpneq_epu32_mask(b, sentinel);
    _mm512_storeu_si512(values + i, _mm512_maskz_mov_epi32(m, b));
    mask[i / 64] |= std::uint64_t{m} << (i % 64);
  }
}

void intersect_sig(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* operand, std::size_t n) {
  const __m512i sentinel = _mm512_set1_epi32(-1);
  for (std::size_t i = 0; i < n; i += 16) {
    const __m512i v = _mm512_loadu_si512(values + i);
    const __m512i o = _mm512_loadu_si512(operand + i);
    const __mmask16 m = _mm512_mask_cmpeq_epu32_mask(read_bits(mask, i), v, o) & _mm512_cmpneq_epu32_mask(o, sentinel);
    _mm512_storeu_si512(values + i, _mm512_maskz_mov_epi32(m, v));
    write_bits(mask, i, m);
  }
}

void intersect_inter(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; i += 16) {
    const __m512i v = _mm512_loadu_si512(values + i);
    const __mmask16 both = read_bits(mask, i) & read_bits(om, i);
    const __mmask16 m = _mm512_mask_cmpeq_epu32_mask(both, v, _mm512_loadu_si512(ov + i));
    _mm512_storeu_si512(values + i, _mm512_maskz_mov_epi32(m, v));
    write_bits(mask, i, m);
  }
}

void unite_inter(std::uint32_t* values, std::uint64_t* mask, const std::uint32_t* ov, const std::uint64_t* om,
                 std::size_t n) {
  const __m512i ones = _mm512_set1_epi32(-1);
  for (std::size_t i = 0; i < n; i += 16) {
    const __mmask16 ma = read_bits(mask, i);
    const __mmask16 mb = read_bits(om, i);
    const __m512i a = _mm512_mask_mov_epi32(ones, ma, _mm512_loadu_si512(values + i));
    const __m512i b = _mm512_mask_mov_epi32(ones, mb, _mm512_loadu_si512(ov + i));
    const __mmask16 m = ma | mb;
    _mm512_storeu_si512(values + i, _mm512_maskz_mov_epi32(m, _mm512_min_epu32(a, b)));
    write_bits(mask, i, m);
  }
}

}  // namespace

const KernelTable* avx512_table() noexcept {
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
      .lane_width = 16,
      .isa = "avx512",
  };
  return &table;
}

}  // namespace reach::kernels::detail

#pragma GCC pop_options

#else

namespace reach::kernels::detail {
const KernelTable* avx512_table() noexcept { return nullptr; }
}  // namespace reach::kernels::detail

#endif
