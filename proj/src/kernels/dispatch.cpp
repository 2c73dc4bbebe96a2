#include <atomic>
#include <chrono>
#include <cstring>
#include <random>

#include <nlohmann/json.hpp>

#include "reach/errors.hpp"
#include "reach/kernels.hpp"

namespace reach::kernels {
namespace detail {

const KernelTable* lane_table() noexcept {
  static const KernelTable* const best = []() -> const KernelTable* {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512bw") &&
        __builtin_cpu_supports("avx512dq") && __builtin_cpu_supports("avx512vl") && avx512_table() != nullptr) {
      return avx512_table();
    }
    if (__builtin_cpu_supports("avx2") && avx2_table() != nullptr) {
      return avx2_table();
    }
#endif
    return nullptr;
  }();
  return best;
}

namespace {

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{lane_table() != nullptr ? lane_table() : &scalar_table()};
  return slot;
}

}  // namespace

const KernelTable& active_table() noexcept { return *active_slot().load(std::memory_order_relaxed); }

}  // namespace detail

namespace {

void require_lanes(std::size_t n) {
  if (n % 16 != 0) {
    throw ContractError("kernel length " + std::to_string(n) + " is not a multiple of 16");
  }
}

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ContractError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) +
                        ")");
  }
}

void require_mask(std::size_t words, std::size_t n) {
  if (words < mask_words(n)) {
    throw ContractError("mask has " + std::to_string(words) + " words, need " + std::to_string(mask_words(n)));
  }
}

}  // namespace

KernelDispatch current_dispatch() noexcept {
  const auto& t = detail::active_table();
  const bool lanes = &t != &detail::scalar_table();
  return KernelDispatch{lanes ? KernelPath::lane_parallel : KernelPath::scalar_reference, t.lane_width, t.isa};
}

bool lane_parallel_available() noexcept { return detail::lane_table() != nullptr; }

KernelPath select_path(KernelPath path) noexcept {
  const KernelPath previous = current_dispatch().active_path;
  const detail::KernelTable* next = &detail::scalar_table();
  if (path == KernelPath::lane_parallel && detail::lane_table() != nullptr) next = detail::lane_table();
  detail::active_slot().store(next, std::memory_order_relaxed);
  return previous;
}

void lanes_equal_mask(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                      std::span<std::uint64_t> mask) {
  require_same(a.size(), b.size(), "lanes_equal_mask");
  require_lanes(a.size());
  require_mask(mask.size(), a.size());
  detail::active_table().equal_mask(a.data(), b.data(), mask.data(), a.size());
}

std::vector<std::uint64_t> lanes_equal_mask(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::vector<std::uint64_t> mask(mask_words(a.size()));
  lanes_equal_mask(a, b, mask);
  return mask;
}

void lanes_min(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, std::span<std::uint32_t> out) {
  require_same(a.size(), b.size(), "lanes_min");
  require_same(a.size(), out.size(), "lanes_min");
  require_lanes(a.size());
  detail::active_table().min(a.data(), b.data(), out.data(), a.size());
}

std::vector<std::uint32_t> lanes_min(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::vector<std::uint32_t> out(a.size());
  lanes_min(a, b, out);
  return out;
}

std::size_t mask_popcount(std::span<const std::uint64_t> mask) noexcept {
  return detail::active_table().popcount(mask.data(), mask.size());
}

void min_inplace(std::span<std::uint32_t> acc, std::span<const std::uint32_t> b) {
  require_same(acc.size(), b.size(), "min_inplace");
  require_lanes(acc.size());
  detail::active_table().min(acc.data(), b.data(), acc.data(), acc.size());
}

void max_inplace(std::span<std::uint8_t> acc, std::span<const std::uint8_t> b) {
  require_same(acc.size(), b.size(), "max_inplace");
  require_lanes(acc.size());
  detail::active_table().max_u8(acc.data(), b.data(), acc.size());
}

void hash_bins(std::span<std::uint32_t> out, std::span<const std::uint64_t> seeds, std::uint64_t item) {
  require_same(out.size(), seeds.size(), "hash_bins");
  require_lanes(out.size());
  detail::active_table().hash_bins(out.data(), seeds.data(), item, out.size());
}

void hash_min_update(std::span<std::uint32_t> bins, std::span<const std::uint64_t> seeds, std::uint64_t item) {
  require_same(bins.size(), seeds.size(), "hash_min_update");
  require_lanes(bins.size());
  detail::active_table().hash_min_update(bins.data(), seeds.data(), item, bins.size());
}

void lift_signature(std::span<const std::uint32_t> bins, std::span<std::uint32_t> values,
                    std::span<std::uint64_t> mask) {
  require_same(bins.size(), values.size(), "lift_signature");
  require_lanes(bins.size());
  require_mask(mask.size(), bins.size());
  detail::active_table().lift(bins.data(), values.data(), mask.data(), bins.size());
}

void intersect_signature(std::span<std::uint32_t> values, std::span<std::uint64_t> mask,
                         std::span<const std::uint32_t> operand) {
  require_same(values.size(), operand.size(), "intersect_signature");
  require_lanes(values.size());
  require_mask(mask.size(), values.size());
  detail::active_table().intersect_sig(values.data(), mask.data(), operand.data(), values.size());
}

void intersect_intermediate(std::span<std::uint32_t> values, std::span<std::uint64_t> mask,
                            std::span<const std::uint32_t> other_values, std::span<const std::uint64_t> other_mask) {
  require_same(values.size(), other_values.size(), "intersect_intermediate");
  require_lanes(values.size());
  require_mask(mask.size(), values.size());
  require_mask(other_mask.size(), values.size());
  detail::active_table().intersect_inter(values.data(), mask.data(), other_values.data(), other_mask.data(),
                                         values.size());
}

void unite_intermediate(std::span<std::uint32_t> values, std::span<std::uint64_t> mask,
                        std::span<const std::uint32_t> other_values, std::span<const std::uint64_t> other_mask) {
  require_same(values.size(), other_values.size(), "unite_intermediate");
  require_lanes(values.size());
  require_mask(mask.size(), values.size());
  require_mask(other_mask.size(), values.size());
  detail::active_table().unite_inter(values.data(), mask.data(), other_values.data(), other_mask.data(),
                                     values.size());
}

std::string BenchmarkReport::to_json() const {
  nlohmann::json j{
      {"k", k},
      {"iterations", iterations},
      {"scalar_ns", scalar_ns},
      {"vector_ns", vector_ns},
      {"speedup", speedup},
      {"outputs_identical", outputs_identical},
      {"isa", isa},
  };
  return j.dump();
}

namespace {

struct BenchOutput {
  std::vector<std::uint64_t> mask;
  std::vector<std::uint32_t> minimum;
  std::uint64_t checksum = 0;
};

double time_path(const detail::KernelTable& t, const std::vector<std::uint32_t>& a,
                 const std::vector<std::uint32_t>& b, std::size_t iterations, BenchOutput& out) {
  const std::size_t k = a.size();
  out.mask.assign(mask_words(k), 0);
  out.minimum.assign(k, 0);
  out.checksum = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t it = 0; it < iterations; ++it) {
    t.equal_mask(a.data(), b.data(), out.mask.data(), k);
    t.min(a.data(), b.data(), out.minimum.data(), k);
    out.checksum += t.popcount(out.mask.data(), out.mask.size()) + out.minimum[it % k];
  }
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::nano>(stop - start).count();
}

}  // namespace

BenchmarkReport benchmark_kernels(std::size_t k, std::size_t iterations, std::uint64_t seed) {
  require_lanes(k);
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> a(k);
  std::vector<std::uint32_t> b(k);
  // Roughly half the bins agree so the equality mask is not degenerate.
  for (std::size_t i = 0; i < k; ++i) {
    a[i] = static_cast<std::uint32_t>(rng());
    b[i] = (rng() & 1U) != 0 ? a[i] : static_cast<std::uint32_t>(rng());
  }

  const detail::KernelTable* lanes = detail::lane_table();
  const detail::KernelTable& vec = lanes != nullptr ? *lanes : detail::scalar_table();

  BenchOutput scalar_out;
  BenchOutput vector_out;
  BenchmarkReport report;
  report.k = k;
  report.iterations = iterations;
  report.isa = std::string(vec.isa);
  report.scalar_ns = time_path(detail::scalar_table(), a, b, iterations, scalar_out);
  report.vector_ns = time_path(vec, a, b, iterations, vector_out);
  report.speedup = report.vector_ns > 0.0 ? report.scalar_ns / report.vector_ns : 0.0;
  report.outputs_identical = scalar_out.mask == vector_out.mask && scalar_out.minimum == vector_out.minimum &&
                             scalar_out.checksum == vector_out.checksum;
  return report;
}

}  // namespace reach::kernels
