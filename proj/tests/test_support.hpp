#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace reach::testing {

// n distinct random 64-bit items.
inline std::vector<std::uint64_t> distinct_items(std::size_t n, std::mt19937_64& rng) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(n * 2);
  std::vector<std::uint64_t> out;
  out.reserve(n);
  while (out.size() < n) {
    const std::uint64_t x = rng();
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

// Two sets with |A| = |B| = size and exact Jaccard as close to `jaccard` as
// integer sizes allow. Returns (A, B, exact J).
struct SetPair {
  std::vector<std::uint64_t> a;
  std::vector<std::uint64_t> b;
  double exact = 0.0;
};

inline SetPair planted_pair(std::size_t size, double jaccard, std::mt19937_64& rng) {
  // |A ∩ B| = 2 J size / (1 + J)
  const auto common = static_cast<std::size_t>(std::llround(2.0 * jaccard * static_cast<double>(size) / (1.0 + jaccard)));
  const std::size_t only = size - common;
  auto items = distinct_items(common + 2 * only, rng);
  SetPair p;
  p.a.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(common + only));
  p.b.assign(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(common));
  p.b.insert(p.b.end(), items.begin() + static_cast<std::ptrdiff_t>(common + only), items.end());
  p.exact = static_cast<double>(common) / static_cast<double>(common + 2 * only);
  return p;
}

}  // namespace reach::testing
