#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "reach/config.hpp"
#include "reach/hash.hpp"

namespace reach {

inline constexpr std::uint32_t kEmptyBin = 0xFFFFFFFFu;

// k-bin MinHash signature; bin i keeps the minimum of bin_hash(item, seed_i)
// over the set. An empty set is all kEmptyBin.
class MinHashSignature {
 public:
  explicit MinHashSignature(const HashConfig& config);

  static MinHashSignature from_bins(const HashConfig& config, std::vector<std::uint32_t> bins);

  void insert(std::uint64_t item) noexcept;
  void insert(std::span<const std::uint64_t> items) noexcept;

  // Per-bin minimum: the signature of the set union.
  void merge(const MinHashSignature& other);

  [[nodiscard]] const HashConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::span<const std::uint32_t> bins() const noexcept { return bins_; }
  [[nodiscard]] std::span<std::uint32_t> mutable_bins() noexcept { return bins_; }
  [[nodiscard]] std::span<const std::uint64_t> seeds() const noexcept { return *seeds_; }
  [[nodiscard]] bool empty() const noexcept;

  friend bool operator==(const MinHashSignature& a, const MinHashSignature& b) noexcept {
    return a.config_ == b.config_ && a.bins_ == b.bins_;
  }

 private:
  HashConfig config_;
  std::shared_ptr<const SeedTable> seeds_;
  std::vector<std::uint32_t> bins_;
};

[[nodiscard]] MinHashSignature mh_merge_union(const MinHashSignature& a, const MinHashSignature& b);

// Values plus validity mask carrying the agreement state of a multi-way
// intersection. Invalid bins always hold 0, so equality is byte equality.
class IntermediateSignature {
 public:
  // All bins invalid: the identity of unite().
  explicit IntermediateSignature(const HashConfig& config);

  // Lift a first-level signature: non-empty bins become valid.
  static IntermediateSignature from_signature(const MinHashSignature& sig);

  // Throws FormatError when an invalid bin carries a non-zero value or mask
  // bits beyond k are set.
  static IntermediateSignature from_parts(const HashConfig& config, std::vector<std::uint32_t> values,
                                          std::vector<std::uint64_t> mask);

  // Bin stays valid iff it equals operand's bin and operand's bin is not empty.
  void intersect(const MinHashSignature& operand);
  // Bin stays valid iff valid in both and the values agree.
  void intersect(const IntermediateSignature& other);
  // Bin valid iff valid in either; value is the minimum of the valid ones.
  void unite(const IntermediateSignature& other);

  [[nodiscard]] const HashConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::span<const std::uint32_t> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const std::uint64_t> mask() const noexcept { return mask_; }
  [[nodiscard]] bool valid(std::uint32_t bin) const noexcept { return (mask_[bin / 64] >> (bin % 64)) & 1U; }
  [[nodiscard]] std::size_t valid_count() const noexcept;

  // True when every signature folded into this one was the empty set.
  // In-memory provenance only; not part of the wire format or equality.
  [[nodiscard]] bool from_empty_operands() const noexcept { return empty_operands_; }

  friend bool operator==(const IntermediateSignature& a, const IntermediateSignature& b) noexcept {
    return a.config_ == b.config_ && a.values_ == b.values_ && a.mask_ == b.mask_;
  }

 private:
  HashConfig config_;
  std::vector<std::uint32_t> values_;
  std::vector<std::uint64_t> mask_;
  bool empty_operands_ = true;
};

[[nodiscard]] IntermediateSignature mh_to_intermediate(const MinHashSignature& sig);
[[nodiscard]] IntermediateSignature mh_intersect(IntermediateSignature acc, const MinHashSignature& operand);
[[nodiscard]] IntermediateSignature inter_intersect(IntermediateSignature a, const IntermediateSignature& b);
[[nodiscard]] IntermediateSignature inter_union(IntermediateSignature a, const IntermediateSignature& b);

struct JaccardRatio {
  double value = 0.0;
  // Every contributing operand was empty; value is forced to 0.
  bool empty_operands = false;
};

// popcount(valid mask) / k.
[[nodiscard]] JaccardRatio jaccard_ratio(const IntermediateSignature& acc) noexcept;

}  // namespace reach
