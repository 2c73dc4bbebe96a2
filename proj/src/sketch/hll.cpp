#include "reach/hll.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "reach/errors.hpp"
#include "reach/hash.hpp"
#include "reach/kernels.hpp"

namespace reach {
namespace {

double alpha(std::uint32_t m) noexcept {
  switch (m) {
    case 16:
      return 0.673;
    case 32:
      return 0.697;
    case 64:
      return 0.709;
    default:
      return 0.7213 / (1.0 + 1.079 / static_cast<double>(m));
  }
}

// 2^-r for every representable rank.
const std::array<double, 66>& inverse_powers() noexcept {
  static const std::array<double, 66> table = [] {
    std::array<double, 66> t{};
    for (std::size_t r = 0; r < t.size(); ++r) t[r] = std::ldexp(1.0, -static_cast<int>(r));
    return t;
  }();
  return table;
}

}  // namespace

HllSketch::HllSketch(const HashConfig& config) : config_(config) {
  config_.validate();
  registers_.assign(config_.registers(), 0);
}

HllSketch HllSketch::from_registers(const HashConfig& config, std::vector<std::uint8_t> registers) {
  HllSketch s(config);
  if (registers.size() != s.registers_.size()) {
    throw FormatError(0, "expected " + std::to_string(s.registers_.size()) + " registers, got " +
                             std::to_string(registers.size()));
  }
  const std::uint8_t limit = max_rank(config.precision);
  for (std::size_t i = 0; i < registers.size(); ++i) {
    if (registers[i] > limit) {
      throw FormatError(i, "register " + std::to_string(i) + " value " + std::to_string(registers[i]) +
                               " exceeds " + std::to_string(limit));
    }
  }
  s.registers_ = std::move(registers);
  return s;
}

HllSketch::Slot HllSketch::locate(std::uint64_t item, const HashConfig& config) noexcept {
  const int p = config.precision;
  const std::uint64_t h = hll_hash(item, config.global_seed);
  const auto index = static_cast<std::uint32_t>(h >> (64 - p));
  const std::uint64_t rest = h << p;
  const int limit = 64 - p + 1;
  const int rank = rest == 0 ? limit : std::min(std::countl_zero(rest) + 1, limit);
  return {index, static_cast<std::uint8_t>(rank)};
}

void HllSketch::merge(const HllSketch& other) {
  require_same_config(config_, other.config_);
  kernels::max_inplace(registers_, other.registers_);
}

double HllSketch::estimate() const noexcept {
  const auto m = static_cast<std::uint32_t>(registers_.size());
  const auto& inv = inverse_powers();
  double sum = 0.0;
  std::uint32_t zeros = 0;
  for (const auto r : registers_) {
    sum += inv[r];
    zeros += r == 0 ? 1U : 0U;
  }
  const double md = static_cast<double>(m);
  const double raw = alpha(m) * md * md / sum;
  if (raw <= 2.5 * md && zeros != 0) {
    return md * std::log(md / static_cast<double>(zeros));
  }
  return raw;
}

bool HllSketch::empty() const noexcept {
  return std::all_of(registers_.begin(), registers_.end(), [](std::uint8_t r) { return r == 0; });
}

HllSketch hll_merge(const HllSketch& a, const HllSketch& b) {
  HllSketch out = a;
  out.merge(b);
  return out;
}

}  // namespace reach
