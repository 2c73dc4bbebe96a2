#include "reach/minhash.hpp"

#include <algorithm>

#include "reach/errors.hpp"
#include "reach/kernels.hpp"

namespace reach {

MinHashSignature::MinHashSignature(const HashConfig& config) : config_(config) {
  config_.validate();
  seeds_ = seed_table(config_.global_seed, config_.bins);
  bins_.assign(config_.bins, kEmptyBin);
}

MinHashSignature MinHashSignature::from_bins(const HashConfig& config, std::vector<std::uint32_t> bins) {
  MinHashSignature sig(config);
  if (bins.size() != sig.bins_.size()) {
    throw FormatError(0, "expected " + std::to_string(sig.bins_.size()) + " bins, got " + std::to_string(bins.size()));
  }
  sig.bins_ = std::move(bins);
  return sig;
}

void MinHashSignature::insert(std::uint64_t item) noexcept { kernels::hash_min_update(bins_, *seeds_, item); }

void MinHashSignature::insert(std::span<const std::uint64_t> items) noexcept {
  for (const auto item : items) kernels::hash_min_update(bins_, *seeds_, item);
}

void MinHashSignature::merge(const MinHashSignature& other) {
  require_same_config(config_, other.config_);
  kernels::min_inplace(bins_, other.bins_);
}

bool MinHashSignature::empty() const noexcept {
  return std::all_of(bins_.begin(), bins_.end(), [](std::uint32_t b) { return b == kEmptyBin; });
}

MinHashSignature mh_merge_union(const MinHashSignature& a, const MinHashSignature& b) {
  MinHashSignature out = a;
  out.merge(b);
  return out;
}

IntermediateSignature::IntermediateSignature(const HashConfig& config) : config_(config) {
  config_.validate();
  values_.assign(config_.bins, 0);
  mask_.assign(kernels::mask_words(config_.bins), 0);
}

IntermediateSignature IntermediateSignature::from_signature(const MinHashSignature& sig) {
  IntermediateSignature out(sig.config());
  kernels::lift_signature(sig.bins(), out.values_, out.mask_);
  out.empty_operands_ = sig.empty();
  return out;
}

IntermediateSignature IntermediateSignature::from_parts(const HashConfig& config, std::vector<std::uint32_t> values,
                                                        std::vector<std::uint64_t> mask) {
  IntermediateSignature out(config);
  if (values.size() != out.values_.size() || mask.size() != out.mask_.size()) {
    throw FormatError(0, "intermediate signature dimensions do not match k=" + std::to_string(config.bins));
  }
  const std::uint32_t k = config.bins;
  if (k % 64 != 0 && (mask.back() >> (k % 64)) != 0) {
    throw FormatError(0, "mask bits set beyond bin " + std::to_string(k - 1));
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    const bool valid = (mask[i / 64] >> (i % 64)) & 1U;
    if (!valid && values[i] != 0) {
      throw FormatError(0, "invalid bin " + std::to_string(i) + " carries non-zero value");
    }
  }
  out.values_ = std::move(values);
  out.mask_ = std::move(mask);
  out.empty_operands_ = false;
  return out;
}

void IntermediateSignature::intersect(const MinHashSignature& operand) {
  require_same_config(config_, operand.config());
  kernels::intersect_signature(values_, mask_, operand.bins());
  empty_operands_ = empty_operands_ && operand.empty();
}

void IntermediateSignature::intersect(const IntermediateSignature& other) {
  require_same_config(config_, other.config_);
  kernels::intersect_intermediate(values_, mask_, other.values_, other.mask_);
  empty_operands_ = empty_operands_ && other.empty_operands_;
}

void IntermediateSignature::unite(const IntermediateSignature& other) {
  require_same_config(config_, other.config_);
  kernels::unite_intermediate(values_, mask_, other.values_, other.mask_);
  empty_operands_ = empty_operands_ && other.empty_operands_;
}

std::size_t IntermediateSignature::valid_count() const noexcept { return kernels::mask_popcount(mask_); }

IntermediateSignature mh_to_intermediate(const MinHashSignature& sig) {
  return IntermediateSignature::from_signature(sig);
}

IntermediateSignature mh_intersect(IntermediateSignature acc, const MinHashSignature& operand) {
  acc.intersect(operand);
  return acc;
}

IntermediateSignature inter_intersect(IntermediateSignature a, const IntermediateSignature& b) {
  a.intersect(b);
  return a;
}

IntermediateSignature inter_union(IntermediateSignature a, const IntermediateSignature& b) {
  a.unite(b);
  return a;
}

JaccardRatio jaccard_ratio(const IntermediateSignature& acc) noexcept {
  if (acc.from_empty_operands()) return {0.0, true};
  return {static_cast<double>(acc.valid_count()) / static_cast<double>(acc.config().bins), false};
}

}  // namespace reach
