#include <doctest.h>

#include <bit>
#include <random>
#include <vector>

#include "reach/errors.hpp"
#include "reach/hash.hpp"
#include "reach/kernels.hpp"

using namespace reach;
using namespace reach::kernels;

namespace {

// Bit-loop oracles, independent of the kernel sources.
std::vector<std::uint64_t> oracle_equal(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  std::vector<std::uint64_t> m(mask_words(a.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) m[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return m;
}

std::size_t oracle_popcount(const std::vector<std::uint64_t>& m) {
  std::size_t n = 0;
  for (auto w : m) {
    for (int b = 0; b < 64; ++b) n += (w >> b) & 1U;
  }
  return n;
}

// Values drawn to make equalities, sentinels and boundaries common.
std::vector<std::uint32_t> nasty_values(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) {
    switch (rng() % 5) {
      case 0:
        x = 0;
        break;
      case 1:
        x = 0xFFFFFFFFu;
        break;
      case 2:
        x = static_cast<std::uint32_t>(rng() % 4);
        break;
      default:
        x = static_cast<std::uint32_t>(rng());
    }
  }
  return v;
}

std::vector<std::uint64_t> random_mask(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint64_t> m(mask_words(n));
  for (auto& w : m) w = rng();
  if (n % 64 != 0) m.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  return m;
}

// Canonical accumulator: invalid bins carry 0.
void canonicalize(std::vector<std::uint32_t>& values, const std::vector<std::uint64_t>& mask) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (((mask[i / 64] >> (i % 64)) & 1U) == 0) values[i] = 0;
  }
}

struct PathGuard {
  KernelPath saved;
  explicit PathGuard(KernelPath p) : saved(select_path(p)) {}
  ~PathGuard() { select_path(saved); }
};

}  // namespace

TEST_CASE("lanes_equal_mask examples") {
  std::vector<std::uint32_t> a(64);
  std::vector<std::uint32_t> b(64);
  for (std::uint32_t i = 0; i < 64; ++i) {
    a[i] = i;
    b[i] = i;
  }
  CHECK(lanes_equal_mask(a, b) == std::vector<std::uint64_t>{~std::uint64_t{0}});
  for (std::uint32_t i = 0; i < 64; ++i) b[i] = i + 1;
  CHECK(lanes_equal_mask(a, b) == std::vector<std::uint64_t>{0});

  std::mt19937_64 rng(7);
  const auto x = nasty_values(4096, rng);
  const auto y = nasty_values(4096, rng);
  CHECK(lanes_equal_mask(x, y) == oracle_equal(x, y));
}

TEST_CASE("lanes_min examples") {
  std::mt19937_64 rng(11);
  const auto a = nasty_values(256, rng);
  const std::vector<std::uint32_t> all_ones(256, 0xFFFFFFFFu);
  CHECK(lanes_min(a, all_ones) == a);
  CHECK(lanes_min(a, a) == a);
  const auto b = nasty_values(256, rng);
  const auto m = lanes_min(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(m[i] == std::min(a[i], b[i]));
}

TEST_CASE("mask_popcount examples") {
  CHECK(mask_popcount(std::vector<std::uint64_t>(64, 0)) == 0);
  CHECK(mask_popcount(std::vector<std::uint64_t>(64, ~std::uint64_t{0})) == 4096);
  std::mt19937_64 rng(3);
  const auto m = random_mask(4096, rng);
  CHECK(mask_popcount(m) == oracle_popcount(m));
}

TEST_CASE("kernel contract errors") {
  std::vector<std::uint32_t> a(32);
  std::vector<std::uint32_t> b(48);
  CHECK_THROWS_AS((void)lanes_equal_mask(a, b), ContractError);
  CHECK_THROWS_AS((void)lanes_min(a, b), ContractError);
  std::vector<std::uint32_t> c(20);
  CHECK_THROWS_AS((void)lanes_equal_mask(c, c), ContractError);
}

TEST_CASE("dispatch is queryable and falls back") {
  const auto d = current_dispatch();
  if (lane_parallel_available()) {
    CHECK(d.active_path == KernelPath::lane_parallel);
    CHECK(d.lane_width >= 8);
    CHECK(d.lane_width <= 16);
  }
  {
    PathGuard g(KernelPath::scalar_reference);
    CHECK(current_dispatch().active_path == KernelPath::scalar_reference);
    CHECK(current_dispatch().lane_width == 1);
  }
  CHECK(current_dispatch().active_path == d.active_path);
}

// Every lane-parallel table must match the scalar reference byte for byte.
TEST_CASE("lane kernels are bit-identical to the scalar reference") {
  std::vector<const detail::KernelTable*> tables;
  if (detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2")) tables.push_back(detail::avx2_table());
  if (detail::avx512_table() != nullptr && __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512bw") &&
      __builtin_cpu_supports("avx512dq") && __builtin_cpu_supports("avx512vl")) {
    tables.push_back(detail::avx512_table());
  }
  if (tables.empty()) {
    MESSAGE("no lane-parallel ISA on this host; equivalence fuzz skipped");
    return;
  }
  const auto& ref = detail::scalar_table();
  std::mt19937_64 rng(2024);
  const int cases = 10000;
  for (const auto* t : tables) {
    CAPTURE(t->isa);
    for (int c = 0; c < cases; ++c) {
      const std::size_t n = 16 * (1 + rng() % 24);
      const auto a = nasty_values(n, rng);
      auto b = nasty_values(n, rng);
      // Make a good share of bins agree.
      for (std::size_t i = 0; i < n; ++i) {
        if (rng() % 3 == 0) b[i] = a[i];
      }
      const std::size_t words = mask_words(n);

      std::vector<std::uint64_t> m1(words, 0xAAAA);
      std::vector<std::uint64_t> m2(words, 0x5555);
      ref.equal_mask(a.data(), b.data(), m1.data(), n);
      t->equal_mask(a.data(), b.data(), m2.data(), n);
      REQUIRE(m1 == m2);
      REQUIRE(ref.popcount(m1.data(), words) == t->popcount(m1.data(), words));

      std::vector<std::uint32_t> o1(n);
      std::vector<std::uint32_t> o2(n);
      ref.min(a.data(), b.data(), o1.data(), n);
      t->min(a.data(), b.data(), o2.data(), n);
      REQUIRE(o1 == o2);

      std::vector<std::uint8_t> r1(n);
      std::vector<std::uint8_t> rb(n);
      for (std::size_t i = 0; i < n; ++i) {
        r1[i] = static_cast<std::uint8_t>(rng());
        rb[i] = static_cast<std::uint8_t>(rng());
      }
      auto r2 = r1;
      ref.max_u8(r1.data(), rb.data(), n);
      t->max_u8(r2.data(), rb.data(), n);
      REQUIRE(r1 == r2);

      std::vector<std::uint64_t> seeds(n);
      for (auto& s : seeds) s = rng();
      const std::uint64_t item = c % 7 == 0 ? 0 : rng();
      ref.hash_bins(o1.data(), seeds.data(), item, n);
      t->hash_bins(o2.data(), seeds.data(), item, n);
      REQUIRE(o1 == o2);
      o1 = a;
      o2 = a;
      ref.hash_min_update(o1.data(), seeds.data(), item, n);
      t->hash_min_update(o2.data(), seeds.data(), item, n);
      REQUIRE(o1 == o2);

      std::vector<std::uint32_t> v1(n);
      std::vector<std::uint32_t> v2(n);
      ref.lift(a.data(), v1.data(), m1.data(), n);
      t->lift(a.data(), v2.data(), m2.data(), n);
      REQUIRE(v1 == v2);
      REQUIRE(m1 == m2);

      // Accumulator state for the intermediate steps.
      auto acc_mask = random_mask(n, rng);
      auto acc_vals = a;
      canonicalize(acc_vals, acc_mask);
      auto other_mask = random_mask(n, rng);
      auto other_vals = b;
      canonicalize(other_vals, other_mask);

      v1 = acc_vals;
      v2 = acc_vals;
      m1 = acc_mask;
      m2 = acc_mask;
      ref.intersect_sig(v1.data(), m1.data(), b.data(), n);
      t->intersect_sig(v2.data(), m2.data(), b.data(), n);
      REQUIRE(v1 == v2);
      REQUIRE(m1 == m2);

      v1 = acc_vals;
      v2 = acc_vals;
      m1 = acc_mask;
      m2 = acc_mask;
      ref.intersect_inter(v1.data(), m1.data(), other_vals.data(), other_mask.data(), n);
      t->intersect_inter(v2.data(), m2.data(), other_vals.data(), other_mask.data(), n);
      REQUIRE(v1 == v2);
      REQUIRE(m1 == m2);

      v1 = acc_vals;
      v2 = acc_vals;
      m1 = acc_mask;
      m2 = acc_mask;
      ref.unite_inter(v1.data(), m1.data(), other_vals.data(), other_mask.data(), n);
      t->unite_inter(v2.data(), m2.data(), other_vals.data(), other_mask.data(), n);
      REQUIRE(v1 == v2);
      REQUIRE(m1 == m2);
    }
  }
}

TEST_CASE("scalar hash kernel matches the hash definition") {
  std::vector<std::uint64_t> seeds(32);
  for (std::uint32_t i = 0; i < 32; ++i) seeds[i] = bin_seed(99, i);
  std::vector<std::uint32_t> out(32);
  detail::scalar_table().hash_bins(out.data(), seeds.data(), 12345, 32);
  for (std::uint32_t i = 0; i < 32; ++i) {
    CHECK(out[i] == static_cast<std::uint32_t>(mix64(12345 ^ mix64(99 + i))));
  }
}

TEST_CASE("benchmark report") {
  const auto r = benchmark_kernels(1024, 50);
  CHECK(r.k == 1024);
  CHECK(r.iterations == 50);
  CHECK(r.outputs_identical);
  CHECK(r.scalar_ns > 0.0);
  CHECK(r.vector_ns > 0.0);
  const auto j = r.to_json();
  for (const char* key : {"\"k\"", "\"iterations\"", "\"scalar_ns\"", "\"vector_ns\"", "\"speedup\""}) {
    CHECK(j.find(key) != std::string::npos);
  }
  CHECK_THROWS_AS((void)benchmark_kernels(100, 1), ContractError);
}
